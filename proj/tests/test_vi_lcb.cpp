#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pessiq/dataset_gen.hpp"
#include "pessiq/harness.hpp"
#include "pessiq/mdp.hpp"
#include "pessiq/oracle.hpp"
#include "pessiq/vi_lcb.hpp"

using namespace pessiq;

TEST_CASE("estimate_model") {
    SUBCASE("deterministic MDP is recovered exactly below the last step") {
        const auto mdp = make_chain_mdp(4, 3, 0.0);
        const auto ds = generate_dataset(mdp, Policy::uniform(3, 4, 2), 500, 1);
        const auto model = estimate_model(ds);
        for (int h = 0; h + 1 < 3; ++h)
            for (int s = 0; s < 4; ++s)
                for (int a = 0; a < 2; ++a) {
                    if (model.counts.at(h, s, a) == 0)
                        continue;
                    const auto row = model.row(h, s, a);
                    const auto truth = mdp.P(h, s, a);
                    for (int sn = 0; sn < 4; ++sn)
                        CHECK(row[sn] == truth[sn]);
                    CHECK(model.r_known[(h * 4 + s) * 2 + a] == mdp.r(h, s, a));
                }
    }
    SUBCASE("unvisited rows are uniform") {
        const auto mdp = make_chain_mdp(3, 2, 0.0);
        const auto ds = generate_dataset(mdp, Policy::constant(2, 3, 2, 0), 10, 1);
        const auto model = estimate_model(ds);
        CHECK(model.counts.at(0, 0, 1) == 0);
        for (double p : model.row(0, 0, 1))
            CHECK(p == 1.0 / 3.0);
        CHECK(model.r_known[1] == 0.0);
        for (double p : model.row(1, 0, 0))  // last step has no successor data
            CHECK(p == 1.0 / 3.0);
    }
    SUBCASE("visited rows sum to one") {
        const auto mdp = make_random_mdp(5, 3, 4, 0.5, 3);
        const auto model = estimate_model(generate_dataset(mdp, Policy::uniform(4, 5, 3), 200, 2));
        for (int h = 0; h < 4; ++h)
            for (int s = 0; s < 5; ++s)
                for (int a = 0; a < 3; ++a) {
                    double sum = 0.0;
                    for (double p : model.row(h, s, a))
                        sum += p;
                    CHECK(std::abs(sum - 1.0) <= 1e-12);
                }
    }
    SUBCASE("slippery chain estimate is close at large K") {
        const auto mdp = make_chain_mdp(3, 2, 0.5);
        const auto model = estimate_model(generate_dataset(mdp, Policy::uniform(2, 3, 2), 20000, 4));
        double worst = 0.0;
        for (int s = 0; s < 3; ++s)
            for (int a = 0; a < 2; ++a) {
                if (model.counts.at(0, s, a) == 0)
                    continue;
                double l1 = 0.0;
                for (int sn = 0; sn < 3; ++sn)
                    l1 += std::abs(model.row(0, s, a)[sn] - mdp.P(0, s, a)[sn]);
                worst = std::max(worst, l1);
            }
        CHECK(worst <= 0.05);
    }
}

TEST_CASE("train_vi_lcb") {
    TrainConfig config;
    SUBCASE("deterministic chain with full coverage recovers the optimal policy") {
        const auto mdp = make_chain_mdp(3, 2, 0.0);
        const auto ds = generate_dataset(mdp, Policy::uniform(2, 3, 2), 20000, 5);
        config.c_b = 0.1;
        const auto res = train_vi_lcb(ds, config);
        CHECK(suboptimality(mdp, res.policy) <= 1e-12);
    }
    SUBCASE("a huge penalty clamps everything to zero") {
        const auto mdp = make_random_mdp(4, 3, 3, 1.0, 6);
        const auto ds = generate_dataset(mdp, Policy::uniform(3, 4, 3), 100, 5);
        config.c_b = 1e6;
        const auto res = train_vi_lcb(ds, config);
        for (double q : res.diagnostics.Q)
            CHECK(q == 0.0);
        CHECK(res.policy.action_table() == std::vector<int>(12, 0));
    }
    SUBCASE("one state one action") {
        const int H = 3;
        TabularMDP mdp(1, 1, H, std::vector<double>(H, 1.0), std::vector<double>(H, 1.0), {1.0});
        const std::size_t K = 5000;
        const auto ds = generate_dataset(mdp, Policy::uniform(H, 1, 1), K, 0);
        config.c_b = 0.1;
        const auto res = train_vi_lcb(ds, config);
        const double b = 0.1 * std::sqrt(H * H * iota(1, 1, K * H, config.delta) / static_cast<double>(K));
        CHECK(res.diagnostics.V[0] == doctest::Approx(H * 1.0 - H * b).epsilon(1e-12));
        CHECK(res.diagnostics.V[0] <= solve_optimal(mdp).values.v(0, 0));
    }
    SUBCASE("determinism and nonnegative values") {
        const auto mdp = make_random_mdp(5, 2, 4, 0.6, 7);
        const auto ds = generate_dataset(mdp, Policy::uniform(4, 5, 2), 300, 8);
        config.c_b = 0.05;
        const auto a = train_vi_lcb(ds, config);
        const auto b = train_vi_lcb(ds, config);
        CHECK(a.policy == b.policy);
        CHECK(a.diagnostics.V == b.diagnostics.V);
        for (double v : a.diagnostics.V)
            CHECK(v >= 0.0);
    }
}

TEST_CASE("VI-LCB median gap shrinks with K") {
    const auto mdp = make_random_mdp(6, 3, 3, 0.5, 21);
    const auto mu = Policy::uniform(3, 6, 3);
    const auto v_star = solve_optimal(mdp).values;
    TrainConfig config;
    std::vector<double> medians;
    for (std::size_t K : {500u, 5000u, 50000u}) {
        std::vector<double> gaps;
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            gaps.push_back(suboptimality(mdp, train_vi_lcb(generate_dataset(mdp, mu, K, seed), config).policy, v_star));
        medians.push_back(median(gaps));
    }
    INFO("medians: " << medians[0] << " " << medians[1] << " " << medians[2]);
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
}
