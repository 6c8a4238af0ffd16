#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace npsp;

namespace {

    Environment load(const std::string& name) { return Environment(load_map_file(std::string(NPSP_MAP_DIR) + "/" + name)); }

    EvalPlan small_plan(int episodes = 30, int hidden = 0)
    {
        EvalPlan p;
        p.envs.push_back(load("dm1.map"));
        p.starts_per_env = 2;
        p.trials_per_start = 1;
        p.hidden = hidden;
        p.trial = {episodes, 250};
        return p;
    }

    Genotype filled(std::int8_t d, double c, int hidden = 0)
    {
        Genotype g;
        g.discrete.fill(d);
        g.continuous.assign(continuous_gene_count(hidden), c);
        return g;
    }

} // namespace

TEST_CASE("genotype lengths and rule conversion", "[evolution]")
{
    auto rng = make_rng(1);
    auto g0 = random_genotype(0, rng);
    auto g15 = random_genotype(15, rng);
    CHECK(g0.size() == 19);
    CHECK(g15.size() == 20);
    CHECK(g0.valid());
    CHECK(g15.valid());
    CHECK_FALSE(to_rule(g0).has_alpha_h);
    CHECK(to_rule(g15).has_alpha_h);
    CHECK(from_rule(to_rule(g0)) == g0);
    CHECK(from_rule(to_rule(g15)) == g15);
    auto r = to_rule(g15);
    CHECK(r.eta == g15.continuous[0]);
    CHECK(r.theta == g15.continuous[1]);
    CHECK(r.alpha_h == g15.continuous[2]);
    CHECK(r.alpha_o == g15.continuous[3]);
}

TEST_CASE("evaluation plan size", "[evolution]")
{
    EvalPlan p;
    p.envs.push_back(load("dm1.map"));
    p.envs.push_back(load("dm2.map"));
    CHECK(p.trial_count() == 12);
    p.envs.push_back(load("env1.map")); // one start only
    CHECK(p.trial_count() == 15);
}

TEST_CASE("identity genotype scores one behavior per trial", "[evolution]")
{
    EvalPlan p;
    p.envs.push_back(load("dm1.map"));
    p.envs.push_back(load("dm2.map"));
    p.trial = {500, 250};
    auto g = filled(0, 0.5);
    g.continuous[0] = 0.0; // eta
    auto ev = evaluate(g, p, 9);
    CHECK(ev.fitness == Catch::Approx(0.002).epsilon(1e-12));
    CHECK(ev.mean_distance >= 0.0);
    CHECK(ev.mean_distance <= 2.0);
}

TEST_CASE("evaluation is deterministic and worker-independent", "[evolution]")
{
    auto p = small_plan();
    auto rng = make_rng(3);
    for (int i = 0; i < 3; ++i) {
        auto g = random_genotype(0, rng);
        auto a = evaluate(g, p, 100 + i, 1);
        auto b = evaluate(g, p, 100 + i, 3);
        CHECK(a.fitness == b.fitness);
        CHECK(a.mean_distance == b.mean_distance);
        CHECK(a.fitness >= 0.0);
        CHECK(a.fitness <= 1.0);
    }
}

TEST_CASE("roulette wheel probabilities", "[evolution][statistical]")
{
    auto rng = make_rng(2);
    const std::vector<double> f{1, 1, 2};
    const int n = 100000;
    std::array<int, 3> hits{};
    for (int i = 0; i < n; ++i)
        ++hits[select_parent(f, rng)];
    for (std::size_t k = 0; k < 3; ++k) {
        const double p = f[k] / 4.0;
        const double sigma = std::sqrt(n * p * (1 - p));
        CHECK(std::abs(hits[k] - n * p) <= 3 * sigma);
    }
}

TEST_CASE("roulette fallbacks", "[evolution]")
{
    auto rng = make_rng(2);
    const std::vector<double> zeros(4, 0.0);
    std::array<int, 4> hits{};
    for (int i = 0; i < 40000; ++i)
        ++hits[select_parent(zeros, rng)];
    for (int h : hits)
        CHECK(std::abs(h - 10000) <= 3 * std::sqrt(40000 * 0.25 * 0.75));
    for (int i = 0; i < 100; ++i)
        CHECK(select_parent(std::vector<double>{0.3}, rng) == 0);
    for (int i = 0; i < 1000; ++i)
        CHECK(select_parent(std::vector<double>{0.0, 0.5, 0.0}, rng) == 1);
    CHECK_THROWS_AS(select_parent(std::vector<double>{1.0, -0.1}, rng), ContractViolation);
    CHECK_THROWS_AS(select_parent(std::vector<double>{}, rng), ContractViolation);
}

TEST_CASE("one-point crossover", "[evolution]")
{
    auto a = filled(1, 0.1), b = filled(-1, 0.9);
    auto x = a, y = b;
    swap_tails(x, y, 2);
    CHECK(x.discrete[0] == 1);
    CHECK(x.discrete[1] == 1);
    CHECK(x.discrete[2] == -1);
    CHECK(x.continuous == std::vector<double>(3, 0.9));
    CHECK(y.discrete[1] == -1);
    CHECK(y.discrete[2] == 1);

    auto rng = make_rng(5);
    auto [c, d] = crossover(a, b, rng, 0.0);
    CHECK(c == a);
    CHECK(d == b);

    auto ra = random_genotype(15, rng), rb = random_genotype(15, rng);
    int crossed = 0;
    for (int i = 0; i < 2000; ++i) {
        auto [p, q] = crossover(ra, rb, rng);
        crossed += !(p == ra);
        for (std::size_t k = 0; k < 16; ++k) {
            std::multiset<int> in{ra.discrete[k], rb.discrete[k]}, out{p.discrete[k], q.discrete[k]};
            REQUIRE(in == out);
        }
        for (std::size_t k = 0; k < 4; ++k) {
            std::multiset<double> in{ra.continuous[k], rb.continuous[k]}, out{p.continuous[k], q.continuous[k]};
            REQUIRE(in == out);
        }
    }
    // every tail contains alpha_o, which differs between the parents
    CHECK(std::abs(crossed - 1000) <= 3 * std::sqrt(2000 * 0.25));
}

TEST_CASE("crossover point covers continuous genes", "[evolution]")
{
    auto a = filled(1, 0.0), b = filled(1, 1.0);
    auto x = a, y = b;
    swap_tails(x, y, 18); // only alpha_o swapped
    CHECK(x.continuous == std::vector<double>{0.0, 0.0, 1.0});
    auto longer = filled(1, 0.0, 15);
    CHECK_THROWS_AS(swap_tails(x, longer, 3), ContractViolation);
}

TEST_CASE("mutation rates", "[evolution][statistical]")
{
    auto rng = make_rng(6);
    SECTION("p = 0 leaves discrete genes alone")
    {
        auto g = random_genotype(0, rng);
        auto m = g;
        mutate(m, rng, 0.0, 0.1);
        CHECK(m.discrete == g.discrete);
        CHECK_FALSE(m.continuous == g.continuous);
    }
    SECTION("resample rate")
    {
        // a resample draws uniformly from three values, so a gene changes
        // with probability 0.15 * 2/3 = 0.1
        int changed = 0, total = 0;
        while (total < 10000) {
            auto g = random_genotype(0, rng);
            auto m = g;
            mutate(m, rng);
            for (std::size_t k = 0; k < 16; ++k)
                changed += m.discrete[k] != g.discrete[k];
            total += 16;
        }
        const double p = 0.15 * 2.0 / 3.0;
        CHECK(std::abs(changed - total * p) <= 3 * std::sqrt(total * p * (1 - p)));
    }
    SECTION("continuous genes are clamped")
    {
        int at_one = 0;
        for (int i = 0; i < 1000; ++i) {
            auto g = filled(0, 0.95);
            mutate(g, rng, 0.15, 0.2);
            REQUIRE(g.valid());
            at_one += g.continuous[0] == 1.0;
        }
        CHECK(at_one > 200); // P(N(0, 0.2) > 0.05) is about 0.4
    }
}

TEST_CASE("operators keep genotypes valid", "[evolution][property]")
{
    auto rng = make_rng(7);
    for (int i = 0; i < 2000; ++i) {
        auto a = random_genotype(i % 2 ? 15 : 0, rng), b = random_genotype(i % 2 ? 15 : 0, rng);
        auto [c, d] = crossover(a, b, rng);
        mutate(c, rng, 0.5, 0.5);
        mutate(d, rng, 0.5, 0.5);
        REQUIRE(c.valid());
        REQUIRE(d.valid());
        REQUIRE(c.size() == a.size());
    }
}

TEST_CASE("GA config validation", "[evolution]")
{
    GaConfig c;
    CHECK_NOTHROW(c.validate());
    c.elite = 15;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.crossover_p = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.generations = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("GA smoke run", "[evolution]")
{
    GaConfig cfg;
    cfg.pop_size = 8;
    cfg.generations = 10;
    auto plan = small_plan(50);
    plan.starts_per_env = 1;
    auto res = run_ga(cfg, plan, 4);
    REQUIRE(res.log.size() == 10);
    CHECK(res.population.size() == 8);
    for (std::size_t g = 1; g < res.log.size(); ++g)
        CHECK(res.log[g].best_novelty_score >= res.log[g - 1].best_novelty_score);
    for (const auto& g : res.population)
        CHECK(g.valid());

    auto again = run_ga(cfg, plan, 4, 4);
    REQUIRE(again.log.size() == res.log.size());
    for (std::size_t g = 0; g < res.log.size(); ++g) {
        CHECK(again.log[g].best_novelty == res.log[g].best_novelty);
        CHECK(again.log[g].best_novelty_score == res.log[g].best_novelty_score);
        CHECK(again.log[g].best_distance_score == res.log[g].best_distance_score);
    }
}

TEST_CASE("full elitism freezes the population", "[evolution]")
{
    GaConfig cfg;
    cfg.pop_size = 4;
    cfg.elite = 4;
    cfg.generations = 4;
    auto plan = small_plan(10);
    auto res = run_ga(cfg, plan, 8);
    for (std::size_t g = 1; g < res.log.size(); ++g) {
        CHECK(res.log[g].best_novelty == res.log[0].best_novelty);
        CHECK(res.log[g].best_novelty_score == res.log[0].best_novelty_score);
        CHECK(res.log[g].best_distance_score == res.log[0].best_distance_score);
    }
}

TEST_CASE("generation callback sees every record", "[evolution]")
{
    GaConfig cfg;
    cfg.pop_size = 4;
    cfg.elite = 1;
    cfg.generations = 3;
    int calls = 0;
    run_ga(cfg, small_plan(10), 1, 1, [&](const GenerationRecord& r) { CHECK(r.generation == calls++); });
    CHECK(calls == 3);
}
