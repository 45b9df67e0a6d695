#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pessiq/dataset.hpp"
#include "pessiq/mdp.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

/// Rolls out K independent episodes of mu on mdp. Episode k draws from its own
/// generator keyed by (seed, k), so the result does not depend on generation
/// order.
BatchDataset generate_dataset(const TabularMDP& mdp, const Policy& mu, std::size_t K, std::uint64_t seed,
                              std::string behavior_policy_id = "");

/// Rolls out a single episode using generator state derived from (seed, k).
Trajectory generate_episode(const TabularMDP& mdp, const Policy& mu, std::uint64_t seed, std::size_t k);

struct CoverageReport {
    /// (h, s, a) with d^{pi*}_sa > 0 but no logged visit.
    std::vector<std::array<int, 3>> uncovered;
    /// min over covered optimal pairs of N / (K d^{pi*}_sa); +inf when none.
    double min_coverage_ratio = 0.0;
};

CoverageReport coverage_report(const BatchDataset& ds, const TabularMDP& mdp, const Policy& pi_star);

} // namespace pessiq
