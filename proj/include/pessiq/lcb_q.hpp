#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pessiq/dataset.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

/// Hyper-parameters shared by all three learners.
struct TrainConfig {
    double c_b = 1.0;          // bonus constant, > 0
    double delta = 0.1;        // failure probability, in (0, 1)
    bool record_history = false;
    std::size_t eval_stride = 0;  // episodes between suboptimality snapshots

    void validate() const;
};

/// Rescaled learning rate (H + 1) / (H + n) for the n-th visit, n >= 1.
double eta(std::size_t n, int H);

/// Log factor log(S A T / delta), natural log.
double iota(int S, int A, std::size_t T, double delta);

/// Hoeffding-type penalty c_b sqrt(H^3 iota^2 / n).
double bonus_lcbq(std::size_t n, int H, double iota, double c_b);

/// Weights eta_n^N for n = 0..N: the coefficient the n-th sample carries in
/// the N-th iterate. Entry 0 is 1 when N = 0 and 0 otherwise.
std::vector<double> eta_profile(std::size_t N, int H);

/// Post-hoc evaluation hook. The learner hands out its current greedy policy
/// and never sees the environment itself.
using PolicyEvaluator = std::function<double(const Policy&)>;

struct HistoryPoint {
    std::size_t episode;  // number of episodes processed so far
    double suboptimality;
};

/// Single-pass pessimistic Q-learning state.
class LcbQState {
public:
    LcbQState(int S, int A, int H, const TrainConfig& config, double iota);

    /// One sample (h, s, a, r, s_next). s_next is ignored at the last step.
    void step(int h, int s, int a, double r, int s_next);
    /// Steps h = 0..H-1 of one trajectory.
    void process(const Trajectory& traj);

    int states() const { return S_; }
    int actions() const { return A_; }
    int horizon() const { return H_; }
    double iota() const { return iota_; }

    double q(int h, int s, int a) const { return Q_[cell(h, s, a)]; }
    /// h in [0, H]; layer H is zero.
    double v(int h, int s) const { return V_[static_cast<std::size_t>(h) * S_ + s]; }
    std::size_t count(int h, int s, int a) const { return N_[cell(h, s, a)]; }
    int policy_action(int h, int s) const { return pi_[static_cast<std::size_t>(h) * S_ + s]; }
    Policy policy() const;

    const std::vector<double>& Q() const { return Q_; }
    const std::vector<double>& V() const { return V_; }
    const std::vector<std::size_t>& N() const { return N_; }

private:
    std::size_t cell(int h, int s, int a) const { return (static_cast<std::size_t>(h) * S_ + s) * A_ + a; }

    int S_, A_, H_;
    double c_b_;
    double iota_;
    std::vector<double> Q_;
    std::vector<double> V_;
    std::vector<std::size_t> N_;
    std::vector<int> pi_;
};

struct LcbQDiagnostics {
    std::vector<double> Q, V;
    std::vector<std::size_t> N;
    std::vector<HistoryPoint> history;
};

struct LcbQResult {
    Policy policy;
    LcbQDiagnostics diagnostics;
};

using LcbQObserver = std::function<void(std::size_t episodes_done, const LcbQState&)>;

/// Processes the episodes in order; iota uses T = K H of the dataset.
LcbQResult train_lcb_q(const BatchDataset& ds, const TrainConfig& config, const PolicyEvaluator& evaluator = {},
                       const LcbQObserver& observer = {});

} // namespace pessiq
