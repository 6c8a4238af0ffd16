#pragma once

#include <npsp/behavior.hpp>
#include <npsp/error.hpp>
#include <npsp/evolution.hpp>
#include <npsp/io.hpp>
#include <npsp/maze.hpp>
#include <npsp/parallel.hpp>
#include <npsp/random.hpp>
#include <npsp/trainer.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace npsp::harness {

    /// Lower median: the ceil(n/2)-th order statistic.
    inline double lower_median(std::vector<double> v)
    {
        if (v.empty())
            throw ContractViolation("median of an empty sample");
        std::sort(v.begin(), v.end());
        return v[(v.size() + 1) / 2 - 1];
    }

    inline std::uint64_t fnv1a(std::string_view s)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    inline std::string hex64(std::uint64_t v)
    {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }

    /// Settings shared by every subcommand. `workers` and `out_dir` never affect
    /// results and are excluded from the config hash.
    struct CommonOptions {
        std::vector<std::string> maps;
        std::vector<int> hidden = {0};
        int episodes = 500;
        int steps = 250;
        int trials = 3;
        std::uint64_t seed = 1;
        std::vector<std::string> trainers = {"rs", "rw"};
        double sigma = 0.1;
        std::string rule_path;
        double alpha_h = 1.0;
        double alpha_o = 1.0;
        int workers = 1;
        std::string out_dir = ".";
    };

    inline std::vector<Environment> load_environments(const std::vector<std::string>& paths)
    {
        if (paths.empty())
            throw ValidationError("at least one --map is required");
        std::vector<Environment> envs;
        for (const auto& p : paths)
            envs.emplace_back(load_map_file(p));
        return envs;
    }

    inline Trainer make_trainer(const std::string& kind, const CommonOptions& opt, const std::optional<NpspRule>& rule)
    {
        if (kind == "rs")
            return RandomSearch{};
        if (kind == "rw") {
            if (!(opt.sigma > 0.0))
                throw ValidationError("--sigma must be positive for the random-walk trainer");
            return RandomWalk{opt.sigma};
        }
        if (kind == "npsp") {
            if (!rule)
                throw ValidationError("the npsp trainer needs --rule <path>");
            return NpspTrainer{*rule};
        }
        throw ValidationError("unknown trainer '" + kind + "' (expected rs, rw or npsp)");
    }

    inline std::optional<NpspRule> load_optional_rule(const CommonOptions& opt)
    {
        if (opt.rule_path.empty())
            return std::nullopt;
        return io::load_rule_file(opt.rule_path);
    }

    inline void validate_common(const CommonOptions& opt)
    {
        for (int h : opt.hidden)
            if (h < 0)
                throw ValidationError("--hidden must be non-negative");
        if (opt.hidden.empty())
            throw ValidationError("at least one --hidden size is required");
        if (opt.episodes < 1 || opt.steps < 1)
            throw ValidationError("--episodes and --steps must be positive");
        if (opt.trials < 1)
            throw ValidationError("--trials must be at least 1");
    }

    /// Canonical description of everything that determines a command's results.
    inline nlohmann::ordered_json describe(const std::string& command, const CommonOptions& opt, const std::vector<Environment>& envs)
    {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["seed"] = opt.seed;
        nlohmann::ordered_json maps = nlohmann::ordered_json::array();
        for (const auto& e : envs)
            maps.push_back({{"name", e.map.name()}, {"content_hash", hex64(fnv1a(e.map.serialize()))}});
        j["maps"] = maps;
        j["hidden"] = opt.hidden;
        j["episodes"] = opt.episodes;
        j["steps"] = opt.steps;
        j["trials"] = opt.trials;
        j["trainers"] = opt.trainers;
        j["sigma"] = io::exact(opt.sigma);
        j["alpha_h"] = io::exact(opt.alpha_h);
        j["alpha_o"] = io::exact(opt.alpha_o);
        if (!opt.rule_path.empty())
            j["rule"] = io::format_rule_inline(io::load_rule_file(opt.rule_path));
        return j;
    }

    /// Writes meta.json next to a command's outputs: seed, config hash and config.
    inline void write_meta(const std::string& out_dir, nlohmann::ordered_json config)
    {
        nlohmann::ordered_json meta;
        meta["command"] = config["command"];
        meta["seed"] = config["seed"];
        meta["config_hash"] = hex64(fnv1a(config.dump()));
        meta["config"] = std::move(config);
        io::write_file((std::filesystem::path(out_dir) / "meta.json").string(), meta.dump(2) + "\n");
    }

    inline void ensure_dir(const std::string& dir)
    {
        if (!dir.empty())
            std::filesystem::create_directories(dir);
    }

    inline std::string join_names(const std::vector<Environment>& envs)
    {
        std::string s;
        for (const auto& e : envs)
            s += (s.empty() ? "" : "+") + e.map.name();
        return s;
    }

    // compare ------------------------------------------------------------------

    struct CompareOptions : CommonOptions {
        /// Starts used per map in the standard matrix (maps x starts x trials).
        int starts = 2;
        /// Report each map separately with `trials` trials per map, cycling starts.
        bool per_env = false;
    };

    struct TrialRecord {
        std::string environment;
        std::string algorithm;
        int hidden = 0;
        int start = 0; // 1-based
        int trial = 0;
        std::uint64_t seed = 0;
        double novelty = 0.0;
        double dist_agent = 0.0;
        bool reached_goal = false;
        bool entered_second_room = false;
    };

    struct ReportRow {
        std::string environment;
        std::string algorithm;
        int hidden = 0;
        double median_novelty = 0.0;
        double median_distance = 0.0;
        int goal = 0;
        int second_room = 0;
        int trials = 0;
    };

    struct ComparisonReport {
        std::vector<ReportRow> rows;
        std::vector<TrialRecord> trials;

        const ReportRow* find(const std::string& algorithm, int hidden, const std::string& env = {}) const
        {
            for (const auto& r : rows)
                if (r.algorithm == algorithm && r.hidden == hidden && (env.empty() || r.environment == env))
                    return &r;
            return nullptr;
        }

        std::string rows_csv() const
        {
            std::string out = "environment,algorithm,hidden,median_novelty,median_distance,goal,second_room,trials\n";
            for (const auto& r : rows)
                out += r.environment + ',' + r.algorithm + ',' + std::to_string(r.hidden) + ',' + io::fixed(r.median_novelty) + ','
                    + io::fixed(r.median_distance) + ',' + std::to_string(r.goal) + ',' + std::to_string(r.second_room) + ','
                    + std::to_string(r.trials) + '\n';
            return out;
        }

        std::string trials_csv() const
        {
            std::string out = "environment,algorithm,hidden,start,trial,seed,novelty,dist_agent,reached_goal,entered_second_room\n";
            for (const auto& t : trials)
                out += t.environment + ',' + t.algorithm + ',' + std::to_string(t.hidden) + ',' + std::to_string(t.start) + ','
                    + std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' + io::fixed(t.novelty) + ',' + io::fixed(t.dist_agent) + ','
                    + (t.reached_goal ? "1" : "0") + ',' + (t.entered_second_room ? "1" : "0") + '\n';
            return out;
        }
    };

    inline ReportRow summarize(std::string environment, std::string algorithm, int hidden, const std::vector<const TrialRecord*>& trials)
    {
        ReportRow row{std::move(environment), std::move(algorithm), hidden};
        std::vector<double> nov, dist;
        for (const auto* t : trials) {
            nov.push_back(t->novelty);
            dist.push_back(t->dist_agent);
            row.goal += t->reached_goal ? 1 : 0;
            row.second_room += t->entered_second_room ? 1 : 0;
        }
        row.trials = static_cast<int>(trials.size());
        row.median_novelty = lower_median(nov);
        row.median_distance = lower_median(dist);
        return row;
    }

    inline std::string algorithm_label(const Trainer& t, int hidden) { return trainer_name(t) + std::to_string(hidden) + "H"; }

    /// Runs the full trial matrix for every (trainer, hidden) pair. Trial seeds
    /// depend only on (seed, mode, map, start, trial), so every algorithm starts
    /// from the same family of seeds.
    inline ComparisonReport run_compare(const CompareOptions& opt, const std::vector<Environment>& envs)
    {
        validate_common(opt);
        if (opt.starts < 1)
            throw ValidationError("--starts must be at least 1");
        const auto rule = load_optional_rule(opt);
        std::vector<Trainer> trainers;
        for (const auto& k : opt.trainers)
            trainers.push_back(make_trainer(k, opt, rule));
        if (trainers.empty())
            throw ValidationError("at least one --trainer is required");

        struct Job {
            std::size_t trainer;
            int hidden;
            std::size_t env;
            std::size_t start;
            int trial;
            std::uint64_t seed;
        };
        std::vector<Job> jobs;
        for (std::size_t ti = 0; ti < trainers.size(); ++ti)
            for (int h : opt.hidden)
                for (std::size_t e = 0; e < envs.size(); ++e) {
                    const auto n_starts = envs[e].map.starts().size();
                    if (opt.per_env) {
                        for (int k = 0; k < opt.trials; ++k)
                            jobs.push_back({ti, h, e, static_cast<std::size_t>(k) % n_starts, k,
                                derive_seed(opt.seed, {stream::kCompare, 1, e, static_cast<std::uint64_t>(k)})});
                    }
                    else {
                        const auto used = std::min<std::size_t>(n_starts, static_cast<std::size_t>(opt.starts));
                        for (std::size_t s = 0; s < used; ++s)
                            for (int k = 0; k < opt.trials; ++k)
                                jobs.push_back({ti, h, e, s, k, derive_seed(opt.seed, {stream::kCompare, 0, e, s, static_cast<std::uint64_t>(k)})});
                    }
                }

        const TrialConfig tc{opt.episodes, opt.steps};
        ComparisonReport report;
        report.trials.resize(jobs.size());
        parallel_for(jobs.size(), opt.workers, [&](std::size_t i) {
            const auto& j = jobs[i];
            const auto& env = envs[j.env];
            Topology topo{j.hidden, opt.alpha_h, opt.alpha_o};
            auto t = run_trial(env, env.map.starts()[j.start], trainers[j.trainer], topo, tc, j.seed);
            report.trials[i] = {env.map.name(), algorithm_label(trainers[j.trainer], j.hidden), j.hidden, static_cast<int>(j.start) + 1, j.trial,
                j.seed, t.novelty, t.dist_agent, t.reached_goal, t.entered_second_room};
        });

        const std::string all = join_names(envs);
        for (std::size_t ti = 0; ti < trainers.size(); ++ti)
            for (int h : opt.hidden) {
                const auto label = algorithm_label(trainers[ti], h);
                if (opt.per_env) {
                    for (const auto& env : envs) {
                        std::vector<const TrialRecord*> sel;
                        for (const auto& t : report.trials)
                            if (t.algorithm == label && t.environment == env.map.name())
                                sel.push_back(&t);
                        report.rows.push_back(summarize(env.map.name(), label, h, sel));
                    }
                }
                else {
                    std::vector<const TrialRecord*> sel;
                    for (const auto& t : report.trials)
                        if (t.algorithm == label)
                            sel.push_back(&t);
                    report.rows.push_back(summarize(all, label, h, sel));
                }
            }
        return report;
    }

    inline ComparisonReport cmd_compare(const CompareOptions& opt)
    {
        const auto envs = load_environments(opt.maps);
        auto report = run_compare(opt, envs);
        ensure_dir(opt.out_dir);
        const std::filesystem::path out(opt.out_dir);
        io::write_file((out / "compare.csv").string(), report.rows_csv());
        io::write_file((out / "compare_trials.csv").string(), report.trials_csv());
        auto cfg = describe("compare", opt, envs);
        cfg["starts"] = opt.starts;
        cfg["per_env"] = opt.per_env;
        write_meta(opt.out_dir, cfg);
        return report;
    }

    // heatmap ------------------------------------------------------------------

    struct HeatmapGrid {
        std::string map_name;
        int width = 0;
        int height = 0;
        /// NaN outside the first room.
        std::vector<double> median_distance;
        std::vector<double> median_novelty;
        int cells = 0;
        int cells_below_one = 0;

        static std::string grid_csv(const std::vector<double>& v, int width)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                out += std::isnan(v[i]) ? std::string("-1") : io::fixed(v[i]);
                out += (static_cast<int>(i % static_cast<std::size_t>(width)) == width - 1) ? '\n' : ',';
            }
            return out;
        }
    };

    struct HeatmapOptions : CommonOptions {
        HeatmapOptions()
        {
            trainers = {"npsp"};
            trials = 12;
        }
    };

    /// Trains from every first-room cell (using start 1's heading) and records the
    /// per-cell median distance and novelty.
    inline std::vector<HeatmapGrid> run_heatmap(const HeatmapOptions& opt, const std::vector<Environment>& envs)
    {
        validate_common(opt);
        if (opt.trainers.size() != 1 || opt.hidden.size() != 1)
            throw ValidationError("heatmap takes exactly one --trainer and one --hidden");
        const auto trainer = make_trainer(opt.trainers.front(), opt, load_optional_rule(opt));
        const Topology topo{opt.hidden.front(), opt.alpha_h, opt.alpha_o};
        const TrialConfig tc{opt.episodes, opt.steps};

        std::vector<HeatmapGrid> grids;
        for (std::size_t e = 0; e < envs.size(); ++e) {
            const auto& env = envs[e];
            const auto cells = first_room_cells(env.map);
            const auto heading = env.map.starts().front().heading;
            const auto per_cell = static_cast<std::size_t>(opt.trials);

            std::vector<double> nov(cells.size() * per_cell), dist(cells.size() * per_cell);
            parallel_for(cells.size() * per_cell, opt.workers, [&](std::size_t i) {
                const auto c = i / per_cell, k = i % per_cell;
                const auto seed = derive_seed(opt.seed, {stream::kHeatmap, e, env.map.index(cells[c]), k});
                auto t = run_trial(env, StartPosition{cells[c], heading}, trainer, topo, tc, seed);
                nov[i] = t.novelty;
                dist[i] = t.dist_agent;
            });

            HeatmapGrid g;
            g.map_name = env.map.name();
            g.width = env.map.width();
            g.height = env.map.height();
            g.median_distance.assign(env.map.cell_count(), std::numeric_limits<double>::quiet_NaN());
            g.median_novelty.assign(env.map.cell_count(), std::numeric_limits<double>::quiet_NaN());
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const auto first = static_cast<std::ptrdiff_t>(c * per_cell), last = static_cast<std::ptrdiff_t>((c + 1) * per_cell);
                const double md = lower_median({dist.begin() + first, dist.begin() + last});
                const double mn = lower_median({nov.begin() + first, nov.begin() + last});
                g.median_distance[env.map.index(cells[c])] = md;
                g.median_novelty[env.map.index(cells[c])] = mn;
                g.cells_below_one += md < 1.0 ? 1 : 0;
            }
            g.cells = static_cast<int>(cells.size());
            grids.push_back(std::move(g));
        }
        return grids;
    }

    inline std::vector<HeatmapGrid> cmd_heatmap(const HeatmapOptions& opt)
    {
        const auto envs = load_environments(opt.maps);
        auto grids = run_heatmap(opt, envs);
        ensure_dir(opt.out_dir);
        const std::filesystem::path out(opt.out_dir);
        std::string summary = "environment,cells,cells_median_distance_below_1\n";
        for (const auto& g : grids) {
            io::write_file((out / (g.map_name + "_heatmap_distance.csv")).string(), HeatmapGrid::grid_csv(g.median_distance, g.width));
            io::write_file((out / (g.map_name + "_heatmap_novelty.csv")).string(), HeatmapGrid::grid_csv(g.median_novelty, g.width));
            summary += g.map_name + ',' + std::to_string(g.cells) + ',' + std::to_string(g.cells_below_one) + '\n';
        }
        io::write_file((out / "heatmap_summary.csv").string(), summary);
        write_meta(opt.out_dir, describe("heatmap", opt, envs));
        return grids;
    }

    // evolve -------------------------------------------------------------------

    struct EvolveOptions : CommonOptions {
        int starts = 2;
        /// Independent GA runs; the reported rule is the best by training novelty.
        int runs = 1;
        GaConfig ga;

        EvolveOptions()
        {
            trainers = {"npsp"};
        }
    };

    inline std::string trend_csv(const GaResult& res)
    {
        std::string out = "generation,best_novelty,best_novelty_rule,best_distance,best_distance_rule\n";
        for (const auto& r : res.log)
            out += std::to_string(r.generation) + ',' + io::fixed(r.best_novelty_score) + ',' + io::format_rule_inline(to_rule(r.best_novelty)) + ','
                + io::fixed(r.best_distance_score) + ',' + io::format_rule_inline(to_rule(r.best_distance)) + '\n';
        return out;
    }

    inline std::string population_csv(const GaResult& res)
    {
        std::string out = "index,fitness,mean_distance,rule\n";
        for (std::size_t i = 0; i < res.population.size(); ++i)
            out += std::to_string(i) + ',' + io::fixed(res.evaluations[i].fitness) + ',' + io::fixed(res.evaluations[i].mean_distance) + ','
                + io::format_rule_inline(to_rule(res.population[i])) + '\n';
        return out;
    }

    /// Best-novelty and best-distance records over a whole run.
    inline std::pair<const GenerationRecord*, const GenerationRecord*> overall_best(const GaResult& res)
    {
        const GenerationRecord* nov = &res.log.front();
        const GenerationRecord* dist = &res.log.front();
        for (const auto& r : res.log) {
            if (r.best_novelty_score > nov->best_novelty_score)
                nov = &r;
            if (r.best_distance_score < dist->best_distance_score)
                dist = &r;
        }
        return {nov, dist};
    }

    inline EvalPlan make_plan(const EvolveOptions& opt, std::vector<Environment> envs)
    {
        validate_common(opt);
        if (opt.hidden.size() != 1)
            throw ValidationError("evolve takes exactly one --hidden");
        EvalPlan plan;
        plan.envs = std::move(envs);
        plan.starts_per_env = opt.starts;
        plan.trials_per_start = opt.trials;
        plan.hidden = opt.hidden.front();
        plan.trial = {opt.episodes, opt.steps};
        return plan;
    }

    struct EvolveResult {
        std::vector<GaResult> runs;
        std::size_t best_novelty_run = 0;
        Genotype best_novelty;
        double best_novelty_score = 0.0;
        std::size_t best_distance_run = 0;
        Genotype best_distance;
        double best_distance_score = 0.0;
    };

    using EvolveProgress = std::function<void(int run, const GenerationRecord&)>;

    inline EvolveResult run_evolve(const EvolveOptions& opt, std::vector<Environment> envs, const EvolveProgress& progress = {})
    {
        if (opt.runs < 1)
            throw ValidationError("--runs must be at least 1");
        const auto plan = make_plan(opt, std::move(envs));
        EvolveResult out;
        for (int k = 0; k < opt.runs; ++k) {
            std::function<void(const GenerationRecord&)> cb;
            if (progress)
                cb = [&](const GenerationRecord& r) { progress(k, r); };
            out.runs.push_back(run_ga(opt.ga, plan, derive_seed(opt.seed, {stream::kEvolve, static_cast<std::uint64_t>(k)}), opt.workers, cb));
            auto [nov, dist] = overall_best(out.runs.back());
            if (k == 0 || nov->best_novelty_score > out.best_novelty_score) {
                out.best_novelty_run = static_cast<std::size_t>(k);
                out.best_novelty = nov->best_novelty;
                out.best_novelty_score = nov->best_novelty_score;
            }
            if (k == 0 || dist->best_distance_score < out.best_distance_score) {
                out.best_distance_run = static_cast<std::size_t>(k);
                out.best_distance = dist->best_distance;
                out.best_distance_score = dist->best_distance_score;
            }
        }
        return out;
    }

    /// Writes trend.csv, population.csv and the best rules. With several runs each
    /// run gets a run_<k>/ directory and the top level holds the selected rules and
    /// runs.csv.
    inline EvolveResult cmd_evolve(const EvolveOptions& opt, const EvolveProgress& progress = {})
    {
        auto envs = load_environments(opt.maps);
        auto cfg = describe("evolve", opt, envs);
        auto res = run_evolve(opt, std::move(envs), progress);

        ensure_dir(opt.out_dir);
        const std::filesystem::path out(opt.out_dir);
        std::string runs = "run,best_novelty,best_distance\n";
        for (std::size_t k = 0; k < res.runs.size(); ++k) {
            const auto dir = res.runs.size() == 1 ? out : out / ("run_" + std::to_string(k));
            std::filesystem::create_directories(dir);
            const auto& run = res.runs[k];
            auto [nov, dist] = overall_best(run);
            io::write_file((dir / "trend.csv").string(), trend_csv(run));
            io::write_file((dir / "population.csv").string(), population_csv(run));
            if (res.runs.size() > 1) {
                io::write_file((dir / "best_novelty.rule").string(), io::format_rule(to_rule(nov->best_novelty)));
                io::write_file((dir / "best_distance.rule").string(), io::format_rule(to_rule(dist->best_distance)));
            }
            runs += std::to_string(k) + ',' + io::fixed(nov->best_novelty_score) + ',' + io::fixed(dist->best_distance_score) + '\n';
        }
        io::write_file((out / "best_novelty.rule").string(), io::format_rule(to_rule(res.best_novelty)));
        io::write_file((out / "best_distance.rule").string(), io::format_rule(to_rule(res.best_distance)));
        if (res.runs.size() > 1)
            io::write_file((out / "runs.csv").string(), runs);

        cfg["starts"] = opt.starts;
        cfg["runs"] = opt.runs;
        cfg["pop_size"] = opt.ga.pop_size;
        cfg["elite"] = opt.ga.elite;
        cfg["crossover_p"] = io::exact(opt.ga.crossover_p);
        cfg["discrete_mutation_p"] = io::exact(opt.ga.discrete_mutation_p);
        cfg["continuous_mutation_sd"] = io::exact(opt.ga.continuous_mutation_sd);
        cfg["generations"] = opt.ga.generations;
        cfg["reevaluate_elites"] = opt.ga.reevaluate_elites;
        write_meta(opt.out_dir, cfg);
        return res;
    }

    // trial --------------------------------------------------------------------

    struct TrialOptions : CommonOptions {
        int start = 1; // 1-based
        bool dump_weights = false;

        TrialOptions()
        {
            trainers = {"rs"};
            trials = 1;
        }
    };

    inline std::vector<TrialResult> cmd_trial(const TrialOptions& opt)
    {
        validate_common(opt);
        if (opt.maps.size() != 1 || opt.trainers.size() != 1 || opt.hidden.size() != 1)
            throw ValidationError("trial takes exactly one --map, --trainer and --hidden");
        const auto envs = load_environments(opt.maps);
        const auto& env = envs.front();
        if (opt.start < 1 || opt.start > static_cast<int>(env.map.starts().size()))
            throw ValidationError("--start must name one of the map's start positions");
        const auto trainer = make_trainer(opt.trainers.front(), opt, load_optional_rule(opt));
        const Topology topo{opt.hidden.front(), opt.alpha_h, opt.alpha_o};

        std::vector<TrialResult> results(static_cast<std::size_t>(opt.trials));
        parallel_for(results.size(), opt.workers, [&](std::size_t k) {
            results[k] = run_trial(env, env.map.starts()[static_cast<std::size_t>(opt.start - 1)], trainer, topo, {opt.episodes, opt.steps},
                derive_seed(opt.seed, {stream::kTrial, static_cast<std::uint64_t>(opt.start), k}));
        });

        ensure_dir(opt.out_dir);
        const std::filesystem::path out(opt.out_dir);
        std::string summary = "trial,seed,episodes_run,novelty,dist_agent,trial_min_distance,reached_goal,entered_second_room\n";
        for (std::size_t k = 0; k < results.size(); ++k) {
            const auto& t = results[k];
            io::write_file((out / ("trial_" + std::to_string(k) + ".jsonl")).string(), io::format_trial_log(t));
            if (opt.dump_weights)
                io::write_file((out / ("weights_" + std::to_string(k) + ".csv")).string(), io::format_weights(t.final_weights));
            summary += std::to_string(k) + ',' + std::to_string(t.seed) + ',' + std::to_string(t.episodes.size()) + ',' + io::fixed(t.novelty) + ','
                + io::fixed(t.dist_agent) + ',' + std::to_string(t.trial_min_distance) + ',' + (t.reached_goal ? "1" : "0") + ','
                + (t.entered_second_room ? "1" : "0") + '\n';
        }
        io::write_file((out / "trials.csv").string(), summary);
        auto cfg = describe("trial", opt, envs);
        cfg["start"] = opt.start;
        write_meta(opt.out_dir, cfg);
        return results;
    }

    // distfield ----------------------------------------------------------------

    /// Plain-text graymap: goal cells black, rising to gray 223 at max_dist;
    /// walls and unreachable cells white.
    inline std::string distance_pgm(const DistanceField& f, const std::string& title)
    {
        std::string out = "P2\n# " + title + " distance to goal, darker is closer\n" + std::to_string(f.width) + ' ' + std::to_string(f.height) + "\n255\n";
        for (int y = 0; y < f.height; ++y) {
            for (int x = 0; x < f.width; ++x) {
                const int d = f.at({x, y});
                const int gray = d < 0 ? 255 : static_cast<int>(std::lround(223.0 * d / std::max(f.max_dist, 1)));
                out += (x ? " " : "") + std::to_string(gray);
            }
            out += '\n';
        }
        return out;
    }

    struct DistfieldOptions {
        std::vector<std::string> maps;
        std::string out_dir = ".";
    };

    inline std::vector<DistanceField> cmd_distfield(const DistfieldOptions& opt)
    {
        const auto envs = load_environments(opt.maps);
        ensure_dir(opt.out_dir);
        const std::filesystem::path out(opt.out_dir);
        std::vector<DistanceField> fields;
        std::string summary = "environment,door_distance,max_dist,max_dist_second_room\n";
        for (const auto& env : envs) {
            io::write_file((out / (env.map.name() + "_distance.csv")).string(), env.field.to_csv());
            io::write_file((out / (env.map.name() + "_distance.pgm")).string(), distance_pgm(env.field, env.map.name()));
            summary += env.map.name() + ',' + std::to_string(env.field.door_distance) + ',' + std::to_string(env.field.max_dist) + ','
                + std::to_string(env.field.max_dist_second_room) + '\n';
            fields.push_back(env.field);
        }
        io::write_file((out / "distfield_summary.csv").string(), summary);
        return fields;
    }

} // namespace npsp::harness
