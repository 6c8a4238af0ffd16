#pragma once

#include <npsp/behavior.hpp>
#include <npsp/error.hpp>
#include <npsp/maze.hpp>
#include <npsp/network.hpp>
#include <npsp/plasticity.hpp>
#include <npsp/random.hpp>

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

namespace npsp {

    /// Re-initializes the network after every failed episode.
    struct RandomSearch {};

    /// Adds N(0, sigma) to every free weight after every failed episode.
    struct RandomWalk {
        double sigma = 0.1;
    };

    /// Applies an evolved plasticity rule after every failed episode.
    struct NpspTrainer {
        NpspRule rule;
    };

    using Trainer = std::variant<RandomSearch, RandomWalk, NpspTrainer>;

    inline std::string trainer_name(const Trainer& t)
    {
        struct {
            std::string operator()(const RandomSearch&) const { return "RS"; }
            std::string operator()(const RandomWalk&) const { return "RW"; }
            std::string operator()(const NpspTrainer&) const { return "NPSP"; }
        } v;
        return std::visit(v, t);
    }

    inline bool uses_traces(const Trainer& t) { return std::holds_alternative<NpspTrainer>(t); }

    /// Network topology a trainer actually runs: NPSP rules carry their own scales.
    inline Topology effective_topology(const Trainer& t, Topology topo)
    {
        if (const auto* n = std::get_if<NpspTrainer>(&t)) {
            topo.alpha_o = n->rule.alpha_o;
            if (n->rule.has_alpha_h)
                topo.alpha_h = n->rule.alpha_h;
        }
        return topo;
    }

    struct EpisodeResult {
        std::string behavior;
        int min_distance = 0;
        bool ep = false;
        int steps_used = 0;

        friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
    };

    /// One rollout from `start` with the door closed and the network state reset.
    /// When `nats` is given it is reset and filled with this episode's traces.
    inline EpisodeResult run_episode(const Environment& env, const StartPosition& start, const NetworkWeights& net, int max_steps, NatSet* nats = nullptr)
    {
        if (max_steps < 1)
            throw ContractViolation("an episode needs at least one step");
        const RegionPartition regions(env.map);
        if (nats)
            *nats = reset_nats(net);

        auto state = reset_env(env.map, start);
        auto activ = reset_state(net.topology());
        int region = regions.region_of(state.pos);
        BehaviorString behavior;
        behavior.enter(region);

        EpisodeResult r;
        r.min_distance = env.field.at(state.pos);
        r.ep = reached_goal(state);
        while (!r.ep && r.steps_used < max_steps) {
            auto next = forward_step(net, activ, sense(state));
            if (nats)
                record_step(*nats, net, activ, next);
            const auto action = select_action(next);
            if (action == Action::Press)
                behavior.press(region);
            state = step(state, action);
            ++r.steps_used;
            activ = std::move(next);

            if (int now = regions.region_of(state.pos); now != region) {
                region = now;
                behavior.enter(region);
            }
            r.min_distance = std::min(r.min_distance, env.field.at(state.pos));
            r.ep = reached_goal(state);
        }
        r.behavior = behavior.str();
        return r;
    }

    /// Between-episode weight change. Returns the number of zero incoming vectors
    /// the NPSP normalization had to skip (always 0 for RS and RW).
    inline std::size_t update_weights(const Trainer& trainer, NetworkWeights& net, const NatSet* nats, Rng& rng)
    {
        if (std::holds_alternative<RandomSearch>(trainer)) {
            net = init_random(net.topology(), rng);
            return 0;
        }
        if (const auto* rw = std::get_if<RandomWalk>(&trainer)) {
            if (!(rw->sigma >= 0.0))
                throw ContractViolation("random-walk sigma must be non-negative");
            std::normal_distribution<double> n01(0.0, 1.0);
            for (auto& g : net.groups())
                for (Eigen::Index c = 0; c < g.w.cols(); ++c)
                    for (Eigen::Index r = 0; r < g.w.rows(); ++r) {
                        if (g.zero_diagonal() && r == c)
                            continue;
                        g.w(r, c) += rw->sigma * n01(rng);
                    }
            return 0;
        }
        if (!nats)
            throw ContractViolation("NPSP update requires the episode's activation traces");
        return apply_npsp(net, *nats, std::get<NpspTrainer>(trainer).rule);
    }

    struct TrialConfig {
        int episodes = 500;
        int max_steps = 250;
    };

    struct TrialResult {
        std::vector<EpisodeResult> episodes;
        double novelty = 0.0;
        double dist_agent = 0.0;
        int trial_min_distance = 0;
        bool reached_goal = false;
        bool entered_second_room = false;
        std::uint64_t seed = 0;
        std::size_t zero_vector_events = 0;
        NetworkWeights final_weights;
    };

    /// Trains one randomly initialized network for up to cfg.episodes episodes,
    /// stopping at the first goal-reaching episode. Novelty always divides by the
    /// full episode budget.
    inline TrialResult run_trial(const Environment& env, const StartPosition& start, const Trainer& trainer, const Topology& topology, const TrialConfig& cfg, std::uint64_t seed)
    {
        if (cfg.episodes < 1)
            throw ContractViolation("a trial needs at least one episode");
        auto rng = make_rng(seed);
        auto net = init_random(effective_topology(trainer, topology), rng);

        TrialResult t;
        t.seed = seed;
        t.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
        NatSet nats;
        const bool traced = uses_traces(trainer);
        for (int e = 0; e < cfg.episodes; ++e) {
            auto r = run_episode(env, start, net, cfg.max_steps, traced ? &nats : nullptr);
            const bool solved = r.ep;
            t.episodes.push_back(std::move(r));
            if (solved)
                break;
            t.zero_vector_events += update_weights(trainer, net, traced ? &nats : nullptr, rng);
        }

        std::vector<std::string> behaviors;
        behaviors.reserve(t.episodes.size());
        t.trial_min_distance = t.episodes.front().min_distance;
        for (const auto& r : t.episodes) {
            behaviors.push_back(r.behavior);
            t.trial_min_distance = std::min(t.trial_min_distance, r.min_distance);
            t.reached_goal = t.reached_goal || r.ep;
        }
        t.novelty = novelty_score(behaviors, cfg.episodes);
        t.dist_agent = distance_measure(t.trial_min_distance, env.field);
        t.entered_second_room = entered_second_room(t.trial_min_distance, env.field);
        t.final_weights = std::move(net);
        return t;
    }

} // namespace npsp
