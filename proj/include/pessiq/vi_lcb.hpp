#pragma once

#include <span>
#include <vector>

#include "pessiq/dataset.hpp"
#include "pessiq/lcb_q.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

/// Count-based transition estimate. Rows never visited are uniform and their
/// reward is 0.
struct EmpiricalModel {
    int H = 0, S = 0, A = 0;
    std::vector<double> P_hat;  // [((h * S + s) * A + a) * S + s']
    VisitCounts counts;
    std::vector<double> r_known;  // [(h * S + s) * A + a]

    std::span<const double> row(int h, int s, int a) const {
        return {P_hat.data() + ((static_cast<std::size_t>(h) * S + s) * A + a) * S, static_cast<std::size_t>(S)};
    }
};

EmpiricalModel estimate_model(const BatchDataset& ds);

struct ViLcbDiagnostics {
    std::vector<double> Q, V;
};

struct ViLcbResult {
    Policy policy;
    ViLcbDiagnostics diagnostics;
};

/// Pessimistic backward induction on the empirical model with the Hoeffding
/// penalty c_b sqrt(H^2 iota / max(N, 1)), Q clamped at 0.
ViLcbResult train_vi_lcb(const BatchDataset& ds, const TrainConfig& config);

} // namespace pessiq
