#include <doctest.h>

#include "pessiq/errors.hpp"
#include "pessiq/mdp.hpp"
#include "pessiq/oracle.hpp"
#include "pessiq/policy.hpp"
#include "pessiq/serialization.hpp"

using namespace pessiq;

TEST_CASE("validate_mdp accepts the one-state identity MDP") {
    TabularMDP mdp(1, 1, 1, {1.0}, {1.0}, {1.0});
    CHECK(validate_mdp(mdp).ok());
}

TEST_CASE("validate_mdp names the offending row and magnitude") {
    SUBCASE("row sum") {
        TabularMDP mdp(1, 1, 1, {0.9}, {1.0}, {1.0});
        const auto rep = validate_mdp(mdp);
        REQUIRE(rep.violations.size() == 1);
        CHECK(rep.violations[0].find("P[0][0][0] sums to 0.9") != std::string::npos);
    }
    SUBCASE("reward range") {
        TabularMDP mdp(1, 1, 1, {1.0}, {1.5}, {1.0});
        const auto rep = validate_mdp(mdp);
        REQUIRE(rep.violations.size() == 1);
        CHECK(rep.violations[0].find("r[0][0][0] outside [0,1]") != std::string::npos);
    }
    SUBCASE("rho") {
        TabularMDP mdp(2, 1, 1, {0.5, 0.5, 0.5, 0.5}, {0.0, 0.0}, {0.7, 0.7});
        CHECK_FALSE(validate_mdp(mdp).ok());
        CHECK_THROWS_AS(require_valid(mdp), ValidationError);
    }
}

TEST_CASE("TabularMDP rejects tensors of the wrong size") {
    CHECK_THROWS_AS(TabularMDP(2, 1, 1, {1.0}, {0.0, 0.0}, {1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(TabularMDP(0, 1, 1, {}, {}, {}), ValidationError);
}

TEST_CASE("make_random_mdp") {
    SUBCASE("one-state instance") {
        const auto mdp = make_random_mdp(1, 1, 1, 1.0, 0);
        CHECK(mdp.P(0, 0, 0)[0] == 1.0);
        CHECK(mdp.r(0, 0, 0) >= 0.0);
        CHECK(mdp.r(0, 0, 0) <= 1.0);
    }
    SUBCASE("determinism") {
        CHECK(make_random_mdp(5, 2, 3, 1.0, 7) == make_random_mdp(5, 2, 3, 1.0, 7));
        CHECK(mdp_to_json(make_random_mdp(5, 2, 3, 1.0, 7)) == mdp_to_json(make_random_mdp(5, 2, 3, 1.0, 7)));
        CHECK_FALSE(make_random_mdp(5, 2, 3, 1.0, 7) == make_random_mdp(5, 2, 3, 1.0, 8));
    }
    SUBCASE("sparsity 0.4 on 5 states gives two successors per row") {
        const auto mdp = make_random_mdp(5, 2, 3, 0.4, 7);
        for (int h = 0; h < 3; ++h)
            for (int s = 0; s < 5; ++s)
                for (int a = 0; a < 2; ++a) {
                    int nonzero = 0;
                    for (double p : mdp.P(h, s, a))
                        nonzero += p != 0.0;
                    CHECK(nonzero == 2);
                }
    }
    SUBCASE("rejects non-positive sparsity") {
        CHECK_THROWS_AS(make_random_mdp(3, 2, 2, 0.0, 1), ValidationError);
        CHECK_THROWS_AS(make_random_mdp(3, 2, 2, -0.5, 1), ValidationError);
    }
    SUBCASE("always valid") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const int S = 1 + seed % 6, A = 1 + seed % 3, H = 1 + seed % 4;
            const double sparsity = 0.1 + 0.9 * ((seed * 37) % 10) / 9.0;
            CHECK(validate_mdp(make_random_mdp(S, A, H, sparsity, seed)).ok());
        }
    }
}

TEST_CASE("make_chain_mdp") {
    CHECK_THROWS_AS(make_chain_mdp(1, 2, 0.0), ValidationError);
    CHECK_THROWS_AS(make_chain_mdp(3, 2, 0.6), ValidationError);

    SUBCASE("S=2 H=1 slip=0") {
        const auto sol = solve_optimal(make_chain_mdp(2, 1, 0.0));
        CHECK(sol.values.q(0, 0, chain::kRight) == 1.0);
        CHECK(sol.values.q(0, 0, chain::kLeft) == 0.0);
    }
    SUBCASE("S=3 H=2 slip=0 reaches the rewarding end") {
        const auto mdp = make_chain_mdp(3, 2, 0.0);
        CHECK(solve_optimal(mdp).values.initial_value(mdp.rho()) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("S=3 H=2 slip=0.5 matches the two-step tree") {
        // Advance twice, each with probability 1/2.
        const auto mdp = make_chain_mdp(3, 2, 0.5);
        CHECK(solve_optimal(mdp).values.initial_value(mdp.rho()) == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("valid for a grid of parameters") {
        for (int S = 2; S <= 6; ++S)
            for (int H = 1; H <= 5; ++H)
                for (double slip : {0.0, 0.1, 0.3, 0.5})
                    CHECK(validate_mdp(make_chain_mdp(S, H, slip)).ok());
    }
    SUBCASE("pure function") {
        CHECK(make_chain_mdp(5, 4, 0.2) == make_chain_mdp(5, 4, 0.2));
    }
}

TEST_CASE("mix_policies") {
    const auto base = Policy::constant(2, 3, 4, 0);
    const auto other = Policy::uniform(2, 3, 4);

    CHECK(mix_policies(base, other, 1.0).prob_table() == base.prob_table());
    CHECK(mix_policies(base, other, 0.0).prob_table() == other.prob_table());

    const auto mixed = mix_policies(base, other, 0.5);
    CHECK(mixed.kind() == PolicyKind::Stochastic);
    const auto row = mixed.row(1, 2);
    CHECK(row[0] == 0.625);
    CHECK(row[1] == 0.125);
    CHECK(row[2] == 0.125);
    CHECK(row[3] == 0.125);

    CHECK_THROWS_AS(mix_policies(base, Policy::uniform(2, 3, 3), 0.5), ValidationError);
    CHECK_THROWS_AS(mix_policies(base, other, 1.5), ValidationError);
}

TEST_CASE("mix_policies is idempotent on equal inputs") {
    const auto mdp = make_random_mdp(4, 3, 3, 1.0, 3);
    // A genuinely stochastic policy with awkward probabilities.
    const auto p = mix_policies(solve_optimal(mdp).policy, Policy::uniform(3, 4, 3), 0.37);
    for (double lambda : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0})
        CHECK(mix_policies(p, p, lambda).prob_table() == p.prob_table());
}

TEST_CASE("Policy construction checks its invariants") {
    CHECK_THROWS_AS(Policy::deterministic(1, 2, 2, {0, 2}), ValidationError);
    CHECK_THROWS_AS(Policy::deterministic(1, 2, 2, {0}), ValidationError);
    CHECK_THROWS_AS(Policy::stochastic(1, 1, 2, {0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(Policy::stochastic(1, 1, 2, {1.5, -0.5}), ValidationError);
    CHECK_THROWS_AS(Policy::uniform(1, 1, 2).action(0, 0), ValidationError);
    CHECK(Policy::deterministic(1, 2, 3, {2, 1}).prob(0, 0, 2) == 1.0);
}
