#pragma once

#include <array>
#include <limits>
#include <vector>

#include "pessiq/mdp.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

/// V has H+1 layers (layer H is the terminal zero layer), Q has H.
struct ValueTables {
    int H = 0, S = 0, A = 0;
    std::vector<double> V;  // [h * S + s]
    std::vector<double> Q;  // [(h * S + s) * A + a]

    double v(int h, int s) const { return V[static_cast<std::size_t>(h) * S + s]; }
    double q(int h, int s, int a) const { return Q[(static_cast<std::size_t>(h) * S + s) * A + a]; }
    /// sum_s rho(s) V[0][s]
    double initial_value(std::span<const double> rho) const;
};

ValueTables evaluate_policy(const TabularMDP& mdp, const Policy& pi);

struct OptimalSolution {
    ValueTables values;
    Policy policy;  // deterministic, ties -> smallest action
};

OptimalSolution solve_optimal(const TabularMDP& mdp);

struct OccupancyTable {
    int H = 0, S = 0, A = 0;
    std::vector<double> d_s;   // [h * S + s]
    std::vector<double> d_sa;  // [(h * S + s) * A + a]

    double state(int h, int s) const { return d_s[static_cast<std::size_t>(h) * S + s]; }
    double pair(int h, int s, int a) const { return d_sa[(static_cast<std::size_t>(h) * S + s) * A + a]; }
};

OccupancyTable occupancy(const TabularMDP& mdp, const Policy& pi);

inline constexpr double kInfiniteConcentrability = std::numeric_limits<double>::infinity();

struct ConcentrabilityReport {
    double c_star = 0.0;               // may be +inf
    std::array<int, 3> argmax{0, 0, 0};  // (h, s, a)
    std::vector<double> ratio_table;   // d^{pi*}_sa / d^{mu}_sa, 0/0 = 0

    bool finite() const { return c_star < kInfiniteConcentrability; }
};

ConcentrabilityReport concentrability(const TabularMDP& mdp, const Policy& mu, const Policy& pi_star);

/// V*_0(rho) - V^{pi_hat}_0(rho).
double suboptimality(const TabularMDP& mdp, const Policy& pi_hat);
/// Same, reusing already-solved optimal values.
double suboptimality(const TabularMDP& mdp, const Policy& pi_hat, const ValueTables& optimal);

} // namespace pessiq
