#include "pessiq/lcb_q.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "pessiq/errors.hpp"

namespace pessiq {

void TrainConfig::validate() const {
    if (!(c_b > 0.0))
        throw ValidationError(fmt::format("c_b must be positive, got {}", c_b));
    if (!(delta > 0.0 && delta < 1.0))
        throw ValidationError(fmt::format("delta must lie in (0,1), got {}", delta));
    if (record_history && eval_stride == 0)
        throw ValidationError("record_history requires eval_stride >= 1");
}

double eta(std::size_t n, int H) {
    return static_cast<double>(H + 1) / (static_cast<double>(H) + static_cast<double>(n));
}

double iota(int S, int A, std::size_t T, double delta) {
    return std::log(static_cast<double>(S) * A * static_cast<double>(T) / delta);
}

double bonus_lcbq(std::size_t n, int H, double iota, double c_b) {
    const double h = H;
    return c_b * std::sqrt(h * h * h * iota * iota / static_cast<double>(n));
}

std::vector<double> eta_profile(std::size_t N, int H) {
    std::vector<double> w(N + 1, 0.0);
    if (N == 0) {
        w[0] = 1.0;
        return w;
    }
    // prod_{i=n+1}^{N} (1 - eta_i), accumulated from the back.
    double tail = 1.0;
    for (std::size_t n = N; n >= 1; --n) {
        w[n] = eta(n, H) * tail;
        tail *= 1.0 - eta(n, H);
    }
    return w;
}

LcbQState::LcbQState(int S, int A, int H, const TrainConfig& config, double iota)
    : S_(S), A_(A), H_(H), c_b_(config.c_b), iota_(iota) {
    if (S < 1 || A < 1 || H < 1)
        throw ValidationError(fmt::format("LcbQState: dimensions must be positive (S={}, A={}, H={})", S, A, H));
    const std::size_t cells = static_cast<std::size_t>(H) * S * A;
    Q_.assign(cells, 0.0);
    N_.assign(cells, 0);
    V_.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
    pi_.assign(static_cast<std::size_t>(H) * S, 0);
}

void LcbQState::step(int h, int s, int a, double r, int s_next) {
    if (h < 0 || h >= H_ || s < 0 || s >= S_ || a < 0 || a >= A_ || s_next < 0 || s_next >= S_)
        throw std::out_of_range(fmt::format("LcbQState::step: index out of range (h={}, s={}, a={}, s'={})", h, s, a,
                                            s_next));
    const std::size_t i = cell(h, s, a);
    const std::size_t n = ++N_[i];
    const double rate = eta(n, H_);
    const double b = bonus_lcbq(n, H_, iota_, c_b_);
    const double next_v = V_[static_cast<std::size_t>(h + 1) * S_ + s_next];
    Q_[i] += rate * (r + next_v - Q_[i] - b);

    const double* row = Q_.data() + cell(h, s, 0);
    const auto best = std::max_element(row, row + A_);  // first maximum
    // V and the greedy action move together, and only when V is raised.
    double& v = V_[static_cast<std::size_t>(h) * S_ + s];
    if (*best > v) {
        v = *best;
        pi_[static_cast<std::size_t>(h) * S_ + s] = static_cast<int>(best - row);
    }
}

void LcbQState::process(const Trajectory& traj) {
    if (traj.states.size() != static_cast<std::size_t>(H_) || traj.actions.size() != traj.states.size() ||
        traj.rewards.size() != traj.states.size())
        throw ValidationError(fmt::format("trajectory length differs from H={}", H_));
    for (int h = 0; h < H_; ++h) {
        const int s_next = h + 1 < H_ ? traj.states[h + 1] : 0;
        step(h, traj.states[h], traj.actions[h], traj.rewards[h], s_next);
    }
}

Policy LcbQState::policy() const {
    return Policy::deterministic(H_, S_, A_, pi_);
}

LcbQResult train_lcb_q(const BatchDataset& ds, const TrainConfig& config, const PolicyEvaluator& evaluator,
                       const LcbQObserver& observer) {
    config.validate();
    ds.validate();
    const auto& m = ds.meta;
    LcbQState state(m.S, m.A, m.H, config, iota(m.S, m.A, ds.T(), config.delta));
    const bool track = config.record_history && evaluator;

    LcbQDiagnostics diag;
    for (std::size_t k = 0; k < ds.episodes.size(); ++k) {
        state.process(ds.episodes[k]);
        if (observer)
            observer(k + 1, state);
        if (track && (k + 1) % config.eval_stride == 0)
            diag.history.push_back({k + 1, evaluator(state.policy())});
    }
    diag.Q = state.Q();
    diag.V = state.V();
    diag.N = state.N();
    return {state.policy(), std::move(diag)};
}

} // namespace pessiq
