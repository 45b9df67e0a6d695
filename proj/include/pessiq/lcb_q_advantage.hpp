#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pessiq/dataset.hpp"
#include "pessiq/lcb_q.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

/// Epoch m (1-based) holds 2^m episodes; the last one may be cut short.
struct EpochSchedule {
    std::vector<std::size_t> lengths;  // complete epochs: 2, 4, 8, ...
    std::size_t truncation = 0;        // episodes in a trailing partial epoch

    std::size_t total() const;
};

EpochSchedule make_epoch_schedule(std::size_t K);

/// Full register set of the reference-advantage learner. Per-pair tables are
/// indexed [(h * S + s) * A + a] over h in [0, H); per-state tables
/// [h * S + s] over h in [0, H] with layer H fixed at zero.
struct AdvantageState {
    AdvantageState(int S, int A, int H, const TrainConfig& config, double iota);

    int S, A, H;
    double c_b;
    double iota;
    std::size_t epoch = 1;

    std::vector<double> Q, Q_lcb, Q_bar;
    std::vector<double> mu_bar, mu_bar_next;
    std::vector<double> mu_ref, sigma_ref, mu_adv, sigma_adv;
    std::vector<double> delta_bar, B_bar;
    std::vector<std::size_t> N;      // overall visit counter
    std::vector<std::size_t> N_hat;  // epoch-wise visit counter

    std::vector<double> V, V_bar, V_bar_next;

    std::size_t cell(int h, int s, int a) const { return (static_cast<std::size_t>(h) * S + s) * A + a; }
    std::size_t node(int h, int s) const { return static_cast<std::size_t>(h) * S + s; }

    // Per-visit subroutines; n is the updated overall count of (h, s, a).
    void update_lcb_q(int h, int s, int a, double r, int s_next, std::size_t n);
    void update_moments(int h, int s, int a, int s_next, std::size_t n);
    void update_bonus(int h, int s, int a, std::size_t n);
    /// Returns the penalty b-bar used for this visit.
    double update_lcb_q_ra(int h, int s, int a, double r, int s_next, std::size_t n);

    /// One sample: counters, the three Q registers, V and mu_bar_next.
    void step(int h, int s, int a, double r, int s_next);
    /// Throws ValidationError if the trajectory length differs from H.
    void advantage_episode(const Trajectory& traj);
    /// Promotes the *_next references and restarts the epoch-wise statistics.
    void epoch_rollover();

    /// Greedy argmax of Q, ties to the smallest action.
    Policy greedy_policy() const;
};

struct AdvantageDiagnostics {
    std::vector<double> Q, V;
    std::vector<std::size_t> N;
    std::vector<HistoryPoint> history;
    std::size_t epochs_completed = 0;
};

struct AdvantageResult {
    Policy policy;
    AdvantageDiagnostics diagnostics;
};

struct AdvantageHooks {
    /// Called after every episode.
    std::function<void(std::size_t episodes_done, const AdvantageState&)> observer;
    /// Test hook: never roll references over, keeping V_bar and mu_bar at 0.
    bool skip_rollover = false;
};

AdvantageResult train_lcb_q_advantage(const BatchDataset& ds, const TrainConfig& config,
                                      const PolicyEvaluator& evaluator = {}, const AdvantageHooks& hooks = {});

} // namespace pessiq
