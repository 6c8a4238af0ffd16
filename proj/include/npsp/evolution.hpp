#pragma once

#include <npsp/error.hpp>
#include <npsp/parallel.hpp>
#include <npsp/plasticity.hpp>
#include <npsp/random.hpp>
#include <npsp/trainer.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace npsp {

    /// 16 discrete genes followed by eta, theta, [alpha_h,] alpha_o.
    /// 19 genes without a hidden layer, 20 with one.
    struct Genotype {
        static constexpr std::size_t kDiscrete = 16;

        std::array<std::int8_t, kDiscrete> discrete{};
        std::vector<double> continuous;

        std::size_t size() const { return kDiscrete + continuous.size(); }
        bool has_alpha_h() const { return continuous.size() == 4; }

        bool valid() const
        {
            if (continuous.size() != 3 && continuous.size() != 4)
                return false;
            for (auto g : discrete)
                if (g < -1 || g > 1)
                    return false;
            for (auto c : continuous)
                if (!(c >= 0.0 && c <= 1.0))
                    return false;
            return true;
        }

        friend bool operator==(const Genotype&, const Genotype&) = default;
    };

    inline std::size_t continuous_gene_count(int hidden) { return hidden > 0 ? 4 : 3; }

    inline NpspRule to_rule(const Genotype& g)
    {
        NpspRule r;
        r.table = g.discrete;
        r.eta = g.continuous.at(0);
        r.theta = g.continuous.at(1);
        if (g.has_alpha_h()) {
            r.has_alpha_h = true;
            r.alpha_h = g.continuous[2];
            r.alpha_o = g.continuous[3];
        }
        else
            r.alpha_o = g.continuous.at(2);
        return r;
    }

    inline Genotype from_rule(const NpspRule& r)
    {
        Genotype g;
        g.discrete = r.table;
        g.continuous = {r.eta, r.theta};
        if (r.has_alpha_h)
            g.continuous.push_back(r.alpha_h);
        g.continuous.push_back(r.alpha_o);
        return g;
    }

    inline Genotype random_genotype(int hidden, Rng& rng)
    {
        Genotype g;
        std::uniform_int_distribution<int> tri(-1, 1);
        for (auto& d : g.discrete)
            d = static_cast<std::int8_t>(tri(rng));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        g.continuous.resize(continuous_gene_count(hidden));
        for (auto& c : g.continuous)
            c = u(rng);
        return g;
    }

    /// Trials used to score one genotype: every env x its first `starts_per_env`
    /// starts x `trials_per_start` trials.
    struct EvalPlan {
        std::vector<Environment> envs;
        int starts_per_env = 2;
        int trials_per_start = 3;
        int hidden = 0;
        TrialConfig trial;

        std::size_t trial_count() const
        {
            std::size_t n = 0;
            for (const auto& e : envs)
                n += static_cast<std::size_t>(std::min<int>(starts_per_env, static_cast<int>(e.map.starts().size()))) * trials_per_start;
            return n;
        }
    };

    struct Evaluation {
        double fitness = 0.0;       // mean per-trial novelty
        double mean_distance = 0.0; // mean dist_agent
        std::size_t zero_vector_events = 0;
    };

    inline Evaluation evaluate(const Genotype& genotype, const EvalPlan& plan, std::uint64_t seed, int workers = 1)
    {
        struct Job {
            std::size_t env;
            std::size_t start;
            int trial;
        };
        std::vector<Job> jobs;
        for (std::size_t e = 0; e < plan.envs.size(); ++e) {
            const auto n_starts = std::min<std::size_t>(static_cast<std::size_t>(plan.starts_per_env), plan.envs[e].map.starts().size());
            for (std::size_t s = 0; s < n_starts; ++s)
                for (int k = 0; k < plan.trials_per_start; ++k)
                    jobs.push_back({e, s, k});
        }
        if (jobs.empty())
            throw ContractViolation("evaluation plan has no trials");

        const Trainer trainer = NpspTrainer{to_rule(genotype)};
        const Topology topo{plan.hidden};
        std::vector<TrialResult> results(jobs.size());
        parallel_for(jobs.size(), workers, [&](std::size_t i) {
            const auto& j = jobs[i];
            const auto& env = plan.envs[j.env];
            results[i] = run_trial(env, env.map.starts()[j.start], trainer, topo, plan.trial,
                derive_seed(seed, {j.env, j.start, static_cast<std::uint64_t>(j.trial)}));
        });

        Evaluation ev;
        for (const auto& r : results) {
            ev.fitness += r.novelty;
            ev.mean_distance += r.dist_agent;
            ev.zero_vector_events += r.zero_vector_events;
        }
        ev.fitness /= static_cast<double>(results.size());
        ev.mean_distance /= static_cast<double>(results.size());
        return ev;
    }

    /// Roulette-wheel selection; uniform when every fitness is zero.
    inline std::size_t select_parent(std::span<const double> fitness, Rng& rng)
    {
        if (fitness.empty())
            throw ContractViolation("cannot select from an empty population");
        double total = 0.0;
        for (double f : fitness) {
            if (f < 0.0)
                throw ContractViolation("roulette selection needs non-negative fitness");
            total += f;
        }
        if (total == 0.0)
            return std::uniform_int_distribution<std::size_t>(0, fitness.size() - 1)(rng);

        const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < fitness.size(); ++i) {
            if (fitness[i] <= 0.0)
                continue;
            acc += fitness[i];
            last_positive = i;
            if (r < acc)
                return i;
        }
        return last_positive;
    }

    /// Swaps the tails of a and b after `point` genes (1 <= point < size), over the
    /// concatenated discrete + continuous vector.
    inline void swap_tails(Genotype& a, Genotype& b, std::size_t point)
    {
        if (a.size() != b.size())
            throw ContractViolation("crossover needs genotypes of equal length");
        for (std::size_t i = point; i < a.size(); ++i) {
            if (i < Genotype::kDiscrete)
                std::swap(a.discrete[i], b.discrete[i]);
            else
                std::swap(a.continuous[i - Genotype::kDiscrete], b.continuous[i - Genotype::kDiscrete]);
        }
    }

    inline std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, Rng& rng, double probability = 0.5)
    {
        if (a.size() != b.size())
            throw ContractViolation("crossover needs genotypes of equal length");
        std::pair<Genotype, Genotype> kids{a, b};
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < probability) {
            const auto point = std::uniform_int_distribution<std::size_t>(1, a.size() - 1)(rng);
            swap_tails(kids.first, kids.second, point);
        }
        return kids;
    }

    inline void mutate(Genotype& g, Rng& rng, double discrete_p = 0.15, double continuous_sd = 0.1)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> tri(-1, 1);
        for (auto& d : g.discrete)
            if (u(rng) < discrete_p)
                d = static_cast<std::int8_t>(tri(rng));
        if (continuous_sd > 0.0) {
            std::normal_distribution<double> n(0.0, continuous_sd);
            for (auto& c : g.continuous)
                c = std::clamp(c + n(rng), 0.0, 1.0);
        }
    }

    struct GaConfig {
        int pop_size = 14;
        int elite = 4;
        double crossover_p = 0.5;
        double discrete_mutation_p = 0.15;
        double continuous_mutation_sd = 0.1;
        int generations = 100;
        /// Re-score elites every generation instead of carrying their fitness.
        /// Breaks exact elitism monotonicity since evaluation is stochastic.
        bool reevaluate_elites = false;

        void validate() const
        {
            if (pop_size < 1)
                throw ValidationError("population size must be positive");
            if (elite < 0 || elite > pop_size)
                throw ValidationError("elite count must lie in [0, pop_size]");
            if (generations < 1)
                throw ValidationError("at least one generation is required");
            for (double p : {crossover_p, discrete_mutation_p})
                if (!(p >= 0.0 && p <= 1.0))
                    throw ValidationError("probabilities must lie in [0, 1]");
            if (!(continuous_mutation_sd >= 0.0))
                throw ValidationError("mutation standard deviation must be non-negative");
        }
    };

    struct GenerationRecord {
        int generation = 0;
        Genotype best_novelty;
        double best_novelty_score = 0.0;
        Genotype best_distance;
        double best_distance_score = 0.0;
    };

    struct GaResult {
        std::vector<GenerationRecord> log;
        std::vector<Genotype> population;
        std::vector<Evaluation> evaluations;
    };

    inline GaResult run_ga(const GaConfig& cfg, const EvalPlan& plan, std::uint64_t seed, int workers = 1,
        const std::function<void(const GenerationRecord&)>& on_generation = {})
    {
        cfg.validate();
        const auto n = static_cast<std::size_t>(cfg.pop_size);

        GaResult res;
        {
            auto rng = make_rng(derive_seed(seed, {stream::kInitPopulation}));
            for (std::size_t i = 0; i < n; ++i)
                res.population.push_back(random_genotype(plan.hidden, rng));
        }
        res.evaluations.resize(n);
        std::vector<char> scored(n, 0);

        for (int gen = 0; gen < cfg.generations; ++gen) {
            std::vector<std::size_t> todo;
            for (std::size_t i = 0; i < n; ++i)
                if (!scored[i])
                    todo.push_back(i);
            parallel_for(todo.size(), workers, [&](std::size_t k) {
                const auto i = todo[k];
                res.evaluations[i] = evaluate(res.population[i], plan, derive_seed(seed, {stream::kEvaluate, static_cast<std::uint64_t>(gen), i}));
            });

            GenerationRecord rec;
            rec.generation = gen;
            std::size_t best_nov = 0, best_dist = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (res.evaluations[i].fitness > res.evaluations[best_nov].fitness)
                    best_nov = i;
                if (res.evaluations[i].mean_distance < res.evaluations[best_dist].mean_distance)
                    best_dist = i;
            }
            rec.best_novelty = res.population[best_nov];
            rec.best_novelty_score = res.evaluations[best_nov].fitness;
            rec.best_distance = res.population[best_dist];
            rec.best_distance_score = res.evaluations[best_dist].mean_distance;
            res.log.push_back(rec);
            if (on_generation)
                on_generation(rec);

            if (gen + 1 == cfg.generations)
                break;

            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return res.evaluations[a].fitness > res.evaluations[b].fitness; });

            std::vector<Genotype> next_pop;
            std::vector<Evaluation> next_eval;
            std::vector<char> next_scored;
            for (int e = 0; e < cfg.elite; ++e) {
                next_pop.push_back(res.population[order[e]]);
                next_eval.push_back(res.evaluations[order[e]]);
                next_scored.push_back(cfg.reevaluate_elites ? 0 : 1);
            }

            std::vector<double> fitness(n);
            for (std::size_t i = 0; i < n; ++i)
                fitness[i] = res.evaluations[i].fitness;
            auto rng = make_rng(derive_seed(seed, {stream::kBreed, static_cast<std::uint64_t>(gen)}));
            while (next_pop.size() < n) {
                const auto& pa = res.population[select_parent(fitness, rng)];
                const auto& pb = res.population[select_parent(fitness, rng)];
                auto [ca, cb] = crossover(pa, pb, rng, cfg.crossover_p);
                mutate(ca, rng, cfg.discrete_mutation_p, cfg.continuous_mutation_sd);
                mutate(cb, rng, cfg.discrete_mutation_p, cfg.continuous_mutation_sd);
                for (auto* child : {&ca, &cb}) {
                    if (next_pop.size() == n)
                        break;
                    next_pop.push_back(std::move(*child));
                    next_eval.push_back({});
                    next_scored.push_back(0);
                }
            }
            res.population = std::move(next_pop);
            res.evaluations = std::move(next_eval);
            scored = std::move(next_scored);
        }
        return res;
    }

} // namespace npsp
