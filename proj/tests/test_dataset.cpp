#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pessiq/dataset.hpp"
#include "pessiq/dataset_gen.hpp"
#include "pessiq/errors.hpp"
#include "pessiq/mdp.hpp"
#include "pessiq/oracle.hpp"

using namespace pessiq;

namespace {

std::string serialize(const BatchDataset& ds) {
    std::ostringstream out;
    write_dataset(ds, out);
    return out.str();
}

BatchDataset parse(const std::string& text) {
    std::istringstream in(text);
    return read_dataset(in);
}

} // namespace

TEST_CASE("generate_dataset shape and T") {
    const auto mdp = make_random_mdp(3, 2, 4, 1.0, 1);
    const auto ds = generate_dataset(mdp, Policy::uniform(4, 3, 2), 10, 42, "uniform");
    CHECK(ds.episodes.size() == 10);
    CHECK(ds.T() == 40);
    CHECK(ds.meta.behavior_policy_id == "uniform");
    ds.validate();
    for (const auto& e : ds.episodes)
        for (int h = 0; h < 4; ++h)
            CHECK(e.rewards[h] == mdp.r(h, e.states[h], e.actions[h]));
    CHECK_THROWS_AS(generate_dataset(mdp, Policy::uniform(4, 3, 2), 0, 1), ValidationError);
    CHECK_THROWS_AS(generate_dataset(mdp, Policy::uniform(4, 2, 2), 5, 1), ValidationError);
}

TEST_CASE("one-state one-action MDP logs a constant trajectory") {
    TabularMDP mdp(1, 1, 3, {1.0, 1.0, 1.0}, {0.25, 0.5, 0.75}, {1.0});
    const auto ds = generate_dataset(mdp, Policy::constant(3, 1, 1, 0), 7, 3);
    for (const auto& e : ds.episodes) {
        CHECK(e.states == std::vector<int>{0, 0, 0});
        CHECK(e.actions == std::vector<int>{0, 0, 0});
        CHECK(e.rewards == std::vector<double>{0.25, 0.5, 0.75});
    }
}

TEST_CASE("deterministic chain under always-right") {
    const auto mdp = make_chain_mdp(3, 2, 0.0);
    const auto ds = generate_dataset(mdp, Policy::constant(2, 3, 2, chain::kRight), 1000, 3);
    for (const auto& e : ds.episodes)
        CHECK(e.states[1] == 1);
}

TEST_CASE("generation is deterministic and order-invariant") {
    const auto mdp = make_random_mdp(4, 3, 3, 0.6, 2);
    const auto mu = Policy::uniform(3, 4, 3);
    const auto a = generate_dataset(mdp, mu, 50, 9);
    const auto b = generate_dataset(mdp, mu, 50, 9);
    CHECK(serialize(a) == serialize(b));
    CHECK_FALSE(serialize(a) == serialize(generate_dataset(mdp, mu, 50, 10)));
    // Episode 37 depends only on (seed, 37).
    CHECK(generate_episode(mdp, mu, 9, 37) == a.episodes[37]);
    // A prefix of a larger dataset matches the smaller one.
    const auto c = generate_dataset(mdp, mu, 80, 9);
    for (std::size_t k = 0; k < 50; ++k)
        CHECK(c.episodes[k] == a.episodes[k]);
}

TEST_CASE("write/read round trip") {
    const auto mdp = make_random_mdp(3, 2, 4, 1.0, 1);
    const auto ds = generate_dataset(mdp, Policy::uniform(4, 3, 2), 10, 42, "uniform");
    CHECK(parse(serialize(ds)) == ds);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = make_random_mdp(1 + seed % 4, 1 + seed % 3, 1 + seed % 5, 0.5, seed);
        const auto d = generate_dataset(m, Policy::uniform(m.horizon(), m.states(), m.actions()), 1 + seed * 3,
                                        seed * 1000003u, "u");
        const auto back = parse(serialize(d));
        CHECK(back == d);
        CHECK(serialize(back) == serialize(d));
    }
}

TEST_CASE("read_dataset rejects malformed files") {
    const std::string header =
        R"({"schema":"offline-rl-v1","S":2,"A":2,"H":2,"K":2,"seed":1,"behavior_policy_id":"x"})";
    const std::string ep0 = R"({"k":0,"s":[0,1],"a":[1,0],"r":[0.0,0.5]})";
    const std::string ep1 = R"({"k":1,"s":[1,1],"a":[0,0],"r":[0.0,0.0]})";

    CHECK_NOTHROW(parse(header + "\n" + ep0 + "\n" + ep1 + "\n"));

    auto message = [&](const std::string& text) {
        try {
            parse(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(header + "\n" + ep0 + "\n").find("episode count mismatch") != std::string::npos);
    CHECK(message(header + "\n" + ep0 + "\n" + R"({"k":1,"s":[1,1],"a":[0,2],"r":[0.0,0.0]})" + "\n")
              .find("action out of range") != std::string::npos);
    CHECK(message(header + "\n" + ep0 + "\n" + R"({"k":1,"s":[1,2],"a":[0,0],"r":[0.0,0.0]})" + "\n")
              .find("state out of range") != std::string::npos);
    CHECK(message(header + "\n" + ep0 + "\n" + R"({"k":1,"s":[1],"a":[0],"r":[0.0]})" + "\n")
              .find("length mismatch") != std::string::npos);
    CHECK(message(R"({"schema":"offline-rl-v2","S":2,"A":2,"H":2,"K":2,"seed":1,"behavior_policy_id":"x"})"
                  "\n")
              .find("unknown schema") != std::string::npos);
    CHECK(message("not json\n").find("malformed header") != std::string::npos);
    CHECK(message("").find("malformed header") != std::string::npos);
    CHECK_THROWS_AS(read_dataset(std::string("/nonexistent/dir/data.jsonl")), IoError);
}

TEST_CASE("visit_counts") {
    const auto mdp = make_random_mdp(4, 3, 3, 1.0, 8);
    SUBCASE("K=1 has one unit cell per step") {
        const auto c = visit_counts(generate_dataset(mdp, Policy::uniform(3, 4, 3), 1, 5));
        for (int h = 0; h < 3; ++h) {
            std::size_t nonzero = 0, total = 0;
            for (int s = 0; s < 4; ++s)
                for (int a = 0; a < 3; ++a) {
                    nonzero += c.at(h, s, a) != 0;
                    total += c.at(h, s, a);
                }
            CHECK(nonzero == 1);
            CHECK(total == 1);
        }
    }
    SUBCASE("never-taken actions are zero and each layer sums to K") {
        const auto c = visit_counts(generate_dataset(mdp, Policy::constant(3, 4, 3, 1), 200, 5));
        for (int h = 0; h < 3; ++h) {
            std::size_t total = 0;
            for (int s = 0; s < 4; ++s) {
                CHECK(c.at(h, s, 0) == 0);
                CHECK(c.at(h, s, 2) == 0);
                total += c.at(h, s, 1);
            }
            CHECK(total == 200);
        }
    }
    SUBCASE("chain slip 0.5 visitation frequency") {
        const auto chain_mdp = make_chain_mdp(3, 2, 0.5);
        const auto pi = Policy::constant(2, 3, 2, chain::kRight);
        const auto c = visit_counts(generate_dataset(chain_mdp, pi, 10000, 5));
        const double exact = occupancy(chain_mdp, pi).pair(1, 1, chain::kRight);
        CHECK(exact == 0.5);
        CHECK(std::abs(c.at(1, 1, chain::kRight) / 10000.0 - exact) <= 0.02);
    }
}

TEST_CASE("empirical visitation matches occupancy within three sigma") {
    const auto mdp = make_random_mdp(3, 2, 3, 0.7, 21);
    const auto mu = Policy::uniform(3, 3, 2);
    const std::size_t K = 20000;
    const auto c = visit_counts(generate_dataset(mdp, mu, K, 77));
    const auto d = occupancy(mdp, mu);
    for (int h = 0; h < 3; ++h)
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 2; ++a) {
                const double p = d.pair(h, s, a);
                const double freq = static_cast<double>(c.at(h, s, a)) / K;
                CHECK(std::abs(freq - p) <= 3.0 * std::sqrt(p * (1.0 - p) / K) + 1e-9);
            }
}

TEST_CASE("coverage_report") {
    const auto mdp = make_chain_mdp(3, 2, 0.0);
    const auto star = solve_optimal(mdp).policy;
    SUBCASE("mu = pi* covers everything") {
        const auto rep = coverage_report(generate_dataset(mdp, star, 5000, 1), mdp, star);
        CHECK(rep.uncovered.empty());
        CHECK(rep.min_coverage_ratio == 1.0);
    }
    SUBCASE("behavior that never goes right misses the optimal pairs") {
        const auto rep = coverage_report(generate_dataset(mdp, Policy::constant(2, 3, 2, chain::kLeft), 100, 1),
                                         mdp, star);
        REQUIRE(rep.uncovered.size() == 2);
        CHECK(rep.uncovered[0] == std::array<int, 3>{0, 0, chain::kRight});
        CHECK(rep.uncovered[1] == std::array<int, 3>{1, 1, chain::kRight});
    }
    SUBCASE("K=1 is well formed") {
        const auto rep = coverage_report(generate_dataset(mdp, Policy::uniform(2, 3, 2), 1, 4), mdp, star);
        CHECK(rep.uncovered.size() <= 2);
        CHECK(rep.min_coverage_ratio > 0.0);
    }
}
