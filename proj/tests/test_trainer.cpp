#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace npsp;

namespace {

    const std::string kCorridor = "name: corridor\nheading1: E\n\n"
                                  "#######\n"
                                  "#1...G#\n"
                                  "#.#####\n"
                                  "#.#####\n"
                                  "#.#####\n"
                                  "#B#####\n"
                                  "#######\n";

    Environment dm1() { return Environment(load_map_file(std::string(NPSP_MAP_DIR) + "/dm1.map")); }

    /// 0H network whose argmax is always `a` (bias weight only).
    NetworkWeights constant_policy(Action a)
    {
        NetworkWeights n(Topology{0});
        n.group(NetworkWeights::OI).w(static_cast<Eigen::Index>(a), 3) = 1.0;
        return n;
    }

    NpspRule some_rule()
    {
        NpspRule r;
        r.table = {1, -1, 0, 1, -1, 0, 1, -1, 0, 1, -1, 0, 1, -1, 0, 1};
        r.eta = 0.05;
        r.theta = 0.3;
        r.alpha_o = 0.8;
        return r;
    }

} // namespace

TEST_CASE("constant Stop policy", "[trainer]")
{
    auto env = dm1();
    NetworkWeights zero(Topology{0}); // all-zero weights: ties -> Stop
    auto r = run_episode(env, env.map.starts()[0], zero, 250);
    RegionPartition p(env.map);
    CHECK(r.behavior == std::to_string(p.region_of(env.map.starts()[0].cell)));
    CHECK_FALSE(r.ep);
    CHECK(r.steps_used == 250);
    CHECK(r.min_distance == env.field.at(env.map.starts()[0].cell));
}

TEST_CASE("scripted Straight policy reaches the corridor goal", "[trainer]")
{
    Environment env(load_map(kCorridor));
    auto net = constant_policy(Action::Straight);
    auto r = run_episode(env, env.map.starts()[0], net, 250);
    CHECK(r.ep);
    CHECK(r.min_distance == 0);
    CHECK(r.steps_used == 4);
    CHECK(r.behavior == "1-2");
    CHECK(run_episode(env, env.map.starts()[0], net, 250) == r);
}

TEST_CASE("episode respects max_steps", "[trainer]")
{
    Environment env(load_map(kCorridor));
    auto r = run_episode(env, env.map.starts()[0], constant_policy(Action::Straight), 3);
    CHECK_FALSE(r.ep);
    CHECK(r.steps_used == 3);
    CHECK(r.min_distance == 1);
    CHECK_THROWS_AS(run_episode(env, env.map.starts()[0], constant_policy(Action::Stop), 0), ContractViolation);
}

TEST_CASE("press marks the behavior string", "[trainer]")
{
    auto env = load_map("name: p\n\n#####\n#1.G#\n#B..#\n#####\n");
    Environment e(env);
    auto r = run_episode(e, {{1, 2}, Heading::E}, constant_policy(Action::Press), 5);
    CHECK(r.behavior == "1-1*");
}

TEST_CASE("run_episode NATs match a manual loop", "[trainer][oracle]")
{
    auto env = dm1();
    std::mt19937_64 rng(10);
    for (int h : {0, 15}) {
        auto net = init_random(Topology{h}, rng);
        NatSet nats;
        auto r = run_episode(env, env.map.starts()[1], net, 30, &nats);

        auto st = reset_env(env.map, env.map.starts()[1]);
        auto o = oracle::zero_state(h);
        std::vector<oracle::Activations> log{o};
        for (int t = 0; t < r.steps_used; ++t) {
            auto s = sense(st);
            o = oracle::forward(net, o, {s.left, s.front, s.right});
            log.push_back(o);
            std::size_t best = 0;
            for (std::size_t k = 1; k < 5; ++k)
                if (o.net_o[k] > o.net_o[best])
                    best = k;
            st = step(st, static_cast<Action>(best));
        }
        for (std::size_t g = 0; g < nats.size(); ++g) {
            REQUIRE(nats[g].steps == std::uint32_t(r.steps_used));
            for (Eigen::Index i = 0; i < nats[g].rows; ++i)
                for (Eigen::Index j = 0; j < nats[g].cols; ++j) {
                    const auto& got = nats[g].at(i, j);
                    REQUIRE(std::vector<std::uint32_t>(got.begin(), got.end()) == oracle::recount(log, net.group(g).name, std::size_t(i), std::size_t(j)));
                }
        }
    }
}

TEST_CASE("update_weights", "[trainer]")
{
    auto rng = make_rng(4);
    auto net = init_random(Topology{15}, rng);

    SECTION("RW with sigma 0 is the identity")
    {
        auto w = net;
        update_weights(RandomWalk{0.0}, w, nullptr, rng);
        CHECK(w == net);
    }
    SECTION("RW perturbs without renormalizing and keeps diagonals")
    {
        auto w = net;
        update_weights(RandomWalk{0.1}, w, nullptr, rng);
        CHECK_FALSE(w == net);
        CHECK(w.group(NetworkWeights::H).w.diagonal().isZero(0.0));
        bool off_unit = false;
        for (Eigen::Index r = 0; r < 15; ++r)
            off_unit = off_unit || std::abs(w.incoming_norm(Layer::Hidden, r) - 1.0) > 1e-6;
        CHECK(off_unit);
    }
    SECTION("RS draws fresh unit-norm weights")
    {
        auto a = net, b = net;
        update_weights(RandomSearch{}, a, nullptr, rng);
        update_weights(RandomSearch{}, b, nullptr, rng);
        CHECK_FALSE(a == net);
        CHECK_FALSE(a == b);
        for (Eigen::Index r = 0; r < 5; ++r)
            CHECK(std::abs(a.incoming_norm(Layer::Output, r) - 1.0) < 1e-9);
    }
    SECTION("NPSP with an all-zero table is the identity")
    {
        auto w = net;
        auto nats = reset_nats(w);
        for (auto& n : nats)
            n.steps = 1, std::fill(n.counts.begin(), n.counts.end(), std::array<std::uint32_t, 4>{1, 0, 0, 0});
        NpspRule zero;
        zero.eta = 0.5;
        update_weights(NpspTrainer{zero}, w, &nats, rng);
        for (std::size_t g = 0; g < 4; ++g)
            CHECK(w.group(g).w.isApprox(net.group(g).w, 1e-15));
    }
    SECTION("NPSP without traces is a contract violation")
    {
        auto w = net;
        CHECK_THROWS_AS(update_weights(NpspTrainer{some_rule()}, w, nullptr, rng), ContractViolation);
    }
}

TEST_CASE("trial that solves in episode 1", "[trainer]")
{
    Environment env(load_map(kCorridor));
    // search for a seed whose first random network walks straight into the goal
    TrialResult t;
    std::uint64_t seed = 0;
    for (; seed < 10000; ++seed) {
        t = run_trial(env, env.map.starts()[0], RandomSearch{}, Topology{0}, {500, 250}, seed);
        if (t.episodes.size() == 1 && t.reached_goal)
            break;
    }
    REQUIRE(seed < 10000);
    CHECK(t.dist_agent == 0.0);
    CHECK(t.novelty == 1.0 / 500.0);
    CHECK(t.trial_min_distance == 0);
    CHECK(t.entered_second_room);
}

TEST_CASE("trials are deterministic per seed", "[trainer]")
{
    auto env = dm1();
    for (Trainer tr : {Trainer{RandomSearch{}}, Trainer{RandomWalk{0.1}}, Trainer{NpspTrainer{some_rule()}}}) {
        auto a = run_trial(env, env.map.starts()[0], tr, Topology{15}, {40, 250}, 77);
        auto b = run_trial(env, env.map.starts()[0], tr, Topology{15}, {40, 250}, 77);
        CHECK(a.episodes == b.episodes);
        CHECK(a.novelty == b.novelty);
        CHECK(a.dist_agent == b.dist_agent);
        CHECK(a.final_weights == b.final_weights);
        CHECK(a.seed == 77);
    }
}

TEST_CASE("trial invariants", "[trainer][property]")
{
    auto env = dm1();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Trainer tr = seed % 3 == 0 ? Trainer{RandomSearch{}} : seed % 3 == 1 ? Trainer{RandomWalk{0.2}} : Trainer{NpspTrainer{some_rule()}};
        auto t = run_trial(env, env.map.starts()[seed % 2], tr, Topology{0}, {60, 250}, seed);
        CHECK(t.episodes.size() <= 60);
        CHECK(t.novelty >= 0.0);
        CHECK(t.novelty <= 1.0);
        CHECK(t.dist_agent >= 0.0);
        CHECK(t.dist_agent <= 2.0);
        CHECK((t.dist_agent < 1.0) == t.entered_second_room);
        std::vector<std::string> b;
        int total_steps = 0;
        for (const auto& e : t.episodes) {
            b.push_back(e.behavior);
            total_steps += e.steps_used;
            CHECK((e.min_distance == 0) == e.ep);
        }
        CHECK(total_steps <= 60 * 250);
        CHECK(t.novelty == double(oracle::dedup_count(b)) / 60.0);
        if (!t.reached_goal)
            CHECK(t.episodes.size() == 60);
    }
}

TEST_CASE("RW with vanishing sigma repeats one behavior", "[trainer]")
{
    auto env = dm1();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto t = run_trial(env, env.map.starts()[0], RandomWalk{0.0}, Topology{15}, {100, 250}, seed);
        CHECK(t.novelty == 0.01);
    }
}

TEST_CASE("NPSP trials take alphas from the rule", "[trainer]")
{
    auto rule = some_rule();
    auto topo = effective_topology(NpspTrainer{rule}, Topology{0});
    CHECK(topo.alpha_o == 0.8);
    CHECK(topo.alpha_h == 1.0);
    rule.has_alpha_h = true;
    rule.alpha_h = 0.3;
    CHECK(effective_topology(NpspTrainer{rule}, Topology{15}).alpha_h == 0.3);
    CHECK(effective_topology(RandomSearch{}, Topology{15, 0.5, 0.25}).alpha_o == 0.25);
    CHECK(trainer_name(RandomSearch{}) == "RS");
    CHECK(trainer_name(RandomWalk{}) == "RW");
    CHECK(trainer_name(NpspTrainer{}) == "NPSP");
}
