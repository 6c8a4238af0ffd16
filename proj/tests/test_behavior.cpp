#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <regex>
#include <set>

using namespace npsp;

namespace {

    DistanceField field(int door, int max_dist)
    {
        DistanceField f;
        f.door_distance = door;
        f.max_dist = max_dist;
        f.max_dist_second_room = door - 1;
        return f;
    }

} // namespace

TEST_CASE("region ids", "[behavior]")
{
    RegionPartition p(23, 23);
    CHECK(p.columns() == 8);
    CHECK(p.rows() == 8);
    CHECK(p.region_of({0, 0}) == 1);
    CHECK(p.region_of({2, 2}) == 1);
    CHECK(p.region_of({3, 0}) == 2);
    CHECK(p.region_of({22, 0}) == 8);
    CHECK(p.region_of({0, 3}) == 9);
    CHECK(p.region_of({22, 22}) == 64);
    CHECK_THROWS_AS(p.region_of({23, 0}), ContractViolation);
    CHECK_THROWS_AS(p.region_of({0, -1}), ContractViolation);
}

TEST_CASE("all 529 cells map to 64 squares", "[behavior][oracle]")
{
    RegionPartition p(23, 23);
    std::set<int> ids;
    for (int y = 0; y < 23; ++y)
        for (int x = 0; x < 23; ++x) {
            int id = p.region_of({x, y});
            REQUIRE(id == (y / 3) * 8 + x / 3 + 1);
            ids.insert(id);
        }
    CHECK(ids.size() == 64);
    CHECK(*ids.begin() == 1);
    CHECK(*ids.rbegin() == 64);
}

TEST_CASE("behavior strings", "[behavior]")
{
    BehaviorString b;
    b.enter(13);
    b.press(13);
    b.enter(12);
    CHECK(b.str() == "13-13*-12");

    BehaviorString stay;
    for (int i = 0; i < 50; ++i)
        stay.enter(7);
    CHECK(stay.str() == "7");

    BehaviorString twice;
    twice.enter(4);
    twice.press(4);
    twice.press(4);
    CHECK(twice.str() == "4-4*");

    BehaviorString full;
    for (int k : {13, -13, 12, 11, 4, 3, 2, 1, 8, 9, 10, -10}) {
        if (k < 0)
            full.press(-k);
        else
            full.enter(k);
    }
    CHECK(full.str() == "13-13*-12-11-4-3-2-1-8-9-10-10*");
}

TEST_CASE("serialized strings never repeat a token", "[behavior][property]")
{
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 500; ++rep) {
        BehaviorString b;
        for (int i = 0; i < 40; ++i) {
            int r = 1 + int(rng() % 4);
            if (rng() % 3 == 0)
                b.press(r);
            else
                b.enter(r);
        }
        const auto& t = b.tokens();
        for (std::size_t i = 1; i < t.size(); ++i)
            REQUIRE_FALSE(t[i] == t[i - 1]);
        auto s = "-" + b.str() + "-";
        for (int k = 1; k <= 4; ++k) {
            REQUIRE(s.find("-" + std::to_string(k) + "-" + std::to_string(k) + "-") == std::string::npos);
            REQUIRE(s.find("-" + std::to_string(k) + "*-" + std::to_string(k) + "*-") == std::string::npos);
        }
        REQUIRE(std::regex_match(b.str(), std::regex(R"(\d+\*?(-\d+\*?)*)")));
    }
}

TEST_CASE("novelty_score", "[behavior]")
{
    std::vector<std::string> same(500, "13-12");
    CHECK(novelty_score(same, 500) == 0.002);
    std::vector<std::string> distinct;
    for (int i = 0; i < 500; ++i)
        distinct.push_back(std::to_string(i));
    CHECK(novelty_score(distinct, 500) == 1.0);
    CHECK(novelty_score(std::vector<std::string>{"1"}, 500) == 0.002); // early stop keeps the budget
    CHECK_THROWS_AS(novelty_score(same, 0), ContractViolation);
}

TEST_CASE("novelty_score matches a sort-unique count", "[behavior][oracle]")
{
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t n = 1 + rng() % 300;
        std::size_t alphabet = 1 + rng() % 50;
        std::vector<std::string> v;
        for (std::size_t i = 0; i < n; ++i)
            v.push_back("1-" + std::to_string(rng() % alphabet));
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double expect = double(oracle::dedup_count(v)) / double(n);
        CHECK(novelty_score(v, int(n)) == expect);
        CHECK(novelty_score(shuffled, int(n)) == expect);
    }
}

TEST_CASE("distance_measure regimes", "[behavior]")
{
    auto f = field(10, 40);
    CHECK(distance_measure(0, f) == 0.0);
    CHECK(distance_measure(40, f) == 2.0);
    CHECK(distance_measure(10, f) == 1.25); // on the door: not entered
    CHECK(distance_measure(9, f) == 0.9);
    CHECK(distance_measure(9, f) < 1.0);
    CHECK_FALSE(entered_second_room(10, f));
    CHECK(entered_second_room(9, f));
    CHECK_THROWS_AS(distance_measure(-1, f), ContractViolation);
}

TEST_CASE("distance_measure is monotone and separates the regimes", "[behavior][property]")
{
    for (auto name : {"dm1.map", "dm2.map", "env1.map", "env2.map", "env3.map"}) {
        Environment env(load_map_file(std::string(NPSP_MAP_DIR) + "/" + name));
        const auto& f = env.field;
        double prev = -1.0;
        for (int d = 0; d <= f.max_dist; ++d) {
            double v = distance_measure(d, f);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 2.0);
            REQUIRE(v >= prev);
            REQUIRE((v < 1.0) == entered_second_room(d, f));
            prev = v;
        }
        CHECK(distance_measure(f.max_dist, f) == 2.0);
    }
}
