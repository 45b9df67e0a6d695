#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pessiq/policy.hpp"

namespace pessiq {

/// Finite-horizon tabular MDP with time-dependent kernels and deterministic
/// rewards. Steps are 0-based: h in [0, H). Immutable after construction.
///
/// Flat storage:
///   P   [((h * S + s) * A + a) * S + s']
///   r   [(h * S + s) * A + a]
///   rho [s]
class TabularMDP {
public:
    /// Checks tensor sizes only; probability and range invariants are left to
    /// validate_mdp() so that malformed instances can still be inspected.
    TabularMDP(int S, int A, int H, std::vector<double> P, std::vector<double> r,
               std::vector<double> rho);

    int states() const { return S_; }
    int actions() const { return A_; }
    int horizon() const { return H_; }

    std::span<const double> P(int h, int s, int a) const {
        return {P_.data() + cell(h, s, a) * S_, static_cast<std::size_t>(S_)};
    }
    double r(int h, int s, int a) const { return r_[cell(h, s, a)]; }
    std::span<const double> rho() const { return rho_; }

    const std::vector<double>& transition_tensor() const { return P_; }
    const std::vector<double>& reward_tensor() const { return r_; }

    friend bool operator==(const TabularMDP&, const TabularMDP&) = default;

private:
    std::size_t cell(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
    }

    int S_, A_, H_;
    std::vector<double> P_;
    std::vector<double> r_;
    std::vector<double> rho_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_mdp(const TabularMDP& mdp);

/// Throws ValidationError listing every violation.
void require_valid(const TabularMDP& mdp);

/// Each row picks ceil(sparsity * S) distinct support states and normalizes
/// uniform(0,1] weights over them. Rewards uniform in [0,1], rho uniform.
TabularMDP make_random_mdp(int S, int A, int H, double sparsity, std::uint64_t seed);

namespace chain {
inline constexpr int kLeft = 0;
inline constexpr int kRight = 1;
} // namespace chain

/// Two actions. Left returns to state 0. Right advances one state with
/// probability 1 - slip and otherwise stays put; S-1 is absorbing under right.
/// The only reward sits at the last step: r(H-1, s, right) is the probability
/// that the move ends in state S-1. rho is a point mass on state 0.
TabularMDP make_chain_mdp(int S, int H, double slip);

} // namespace pessiq
