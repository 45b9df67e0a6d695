#include "pessiq/lcb_q_advantage.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "pessiq/errors.hpp"

namespace pessiq {

std::size_t EpochSchedule::total() const {
    std::size_t sum = truncation;
    for (auto len : lengths)
        sum += len;
    return sum;
}

EpochSchedule make_epoch_schedule(std::size_t K) {
    EpochSchedule sched;
    std::size_t remaining = K;
    for (std::size_t len = 2; remaining > 0; len *= 2) {
        if (remaining < len) {
            sched.truncation = remaining;
            break;
        }
        sched.lengths.push_back(len);
        remaining -= len;
    }
    return sched;
}

AdvantageState::AdvantageState(int S_, int A_, int H_, const TrainConfig& config, double iota_)
    : S(S_), A(A_), H(H_), c_b(config.c_b), iota(iota_) {
    if (S < 1 || A < 1 || H < 1)
        throw ValidationError(fmt::format("AdvantageState: dimensions must be positive (S={}, A={}, H={})", S, A, H));
    const std::size_t cells = static_cast<std::size_t>(H) * S * A;
    for (auto* t : {&Q, &Q_lcb, &Q_bar, &mu_bar, &mu_bar_next, &mu_ref, &sigma_ref, &mu_adv, &sigma_adv, &delta_bar,
                    &B_bar})
        t->assign(cells, 0.0);
    N.assign(cells, 0);
    N_hat.assign(cells, 0);
    const std::size_t nodes = static_cast<std::size_t>(H + 1) * S;
    for (auto* t : {&V, &V_bar, &V_bar_next})
        t->assign(nodes, 0.0);
}

void AdvantageState::update_lcb_q(int h, int s, int a, double r, int s_next, std::size_t n) {
    const std::size_t i = cell(h, s, a);
    const double rate = eta(n, H);
    Q_lcb[i] = (1.0 - rate) * Q_lcb[i] + rate * (r + V[node(h + 1, s_next)] - bonus_lcbq(n, H, iota, c_b));
}

void AdvantageState::update_moments(int h, int s, int a, int s_next, std::size_t n) {
    const std::size_t i = cell(h, s, a);
    const double inv = 1.0 / static_cast<double>(n);
    const double rate = eta(n, H);
    const double ref = V_bar_next[node(h + 1, s_next)];
    const double adv = V[node(h + 1, s_next)] - V_bar[node(h + 1, s_next)];
    mu_ref[i] = (1.0 - inv) * mu_ref[i] + inv * ref;
    sigma_ref[i] = (1.0 - inv) * sigma_ref[i] + inv * ref * ref;
    mu_adv[i] = (1.0 - rate) * mu_adv[i] + rate * adv;
    sigma_adv[i] = (1.0 - rate) * sigma_adv[i] + rate * adv * adv;
}

void AdvantageState::update_bonus(int h, int s, int a, std::size_t n) {
    const std::size_t i = cell(h, s, a);
    // Empirical variances; clamp the rounding noise below zero.
    const double var_ref = std::max(0.0, sigma_ref[i] - mu_ref[i] * mu_ref[i]);
    const double var_adv = std::max(0.0, sigma_adv[i] - mu_adv[i] * mu_adv[i]);
    const double B_next =
        c_b * std::sqrt(iota / static_cast<double>(n)) * (std::sqrt(var_ref) + std::sqrt(double(H)) * std::sqrt(var_adv));
    delta_bar[i] = B_next - B_bar[i];
    B_bar[i] = B_next;
}

double AdvantageState::update_lcb_q_ra(int h, int s, int a, double r, int s_next, std::size_t n) {
    const std::size_t i = cell(h, s, a);
    const double rate = eta(n, H);
    const double nd = static_cast<double>(n);
    const double Hd = H;
    const double b = B_bar[i] + (1.0 - rate) * delta_bar[i] / rate + c_b * std::pow(Hd, 1.75) * iota / std::pow(nd, 0.75) +
                     c_b * Hd * Hd * iota / nd;
    const double target = r + V[node(h + 1, s_next)] - V_bar[node(h + 1, s_next)] + mu_bar[i] - b;
    Q_bar[i] = (1.0 - rate) * Q_bar[i] + rate * target;
    return b;
}

void AdvantageState::step(int h, int s, int a, double r, int s_next) {
    if (h < 0 || h >= H || s < 0 || s >= S || a < 0 || a >= A || s_next < 0 || s_next >= S)
        throw std::out_of_range(fmt::format("AdvantageState::step: index out of range (h={}, s={}, a={}, s'={})", h, s,
                                            a, s_next));
    const std::size_t i = cell(h, s, a);
    const std::size_t n = ++N[i];

    update_lcb_q(h, s, a, r, s_next, n);
    update_moments(h, s, a, s_next, n);
    update_bonus(h, s, a, n);
    update_lcb_q_ra(h, s, a, r, s_next, n);

    Q[i] = std::max({Q_lcb[i], Q_bar[i], Q[i]});
    const double* row = Q.data() + cell(h, s, 0);
    V[node(h, s)] = *std::max_element(row, row + A);

    const double inv = 1.0 / static_cast<double>(++N_hat[i]);
    mu_bar_next[i] = (1.0 - inv) * mu_bar_next[i] + inv * V_bar_next[node(h + 1, s_next)];
}

void AdvantageState::advantage_episode(const Trajectory& traj) {
    const auto len = static_cast<std::size_t>(H);
    if (traj.states.size() != len || traj.actions.size() != len || traj.rewards.size() != len)
        throw ValidationError(fmt::format("advantage_episode: trajectory length differs from H={}", H));
    for (int h = 0; h < H; ++h) {
        const int s_next = h + 1 < H ? traj.states[h + 1] : 0;
        step(h, traj.states[h], traj.actions[h], traj.rewards[h], s_next);
    }
}

void AdvantageState::epoch_rollover() {
    V_bar = V_bar_next;
    mu_bar = mu_bar_next;
    V_bar_next = V;
    std::fill(mu_bar_next.begin(), mu_bar_next.end(), 0.0);
    std::fill(N_hat.begin(), N_hat.end(), 0);
    ++epoch;
}

Policy AdvantageState::greedy_policy() const {
    std::vector<int> table(static_cast<std::size_t>(H) * S);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            const double* row = Q.data() + cell(h, s, 0);
            table[node(h, s)] = static_cast<int>(std::max_element(row, row + A) - row);
        }
    return Policy::deterministic(H, S, A, std::move(table));
}

AdvantageResult train_lcb_q_advantage(const BatchDataset& ds, const TrainConfig& config,
                                      const PolicyEvaluator& evaluator, const AdvantageHooks& hooks) {
    config.validate();
    ds.validate();
    const auto& m = ds.meta;
    AdvantageState state(m.S, m.A, m.H, config, iota(m.S, m.A, ds.T(), config.delta));
    const bool track = config.record_history && evaluator;
    const auto schedule = make_epoch_schedule(m.K);

    AdvantageDiagnostics diag;
    std::size_t k = 0;
    auto run_episodes = [&](std::size_t count) {
        for (std::size_t t = 0; t < count; ++t, ++k) {
            state.advantage_episode(ds.episodes[k]);
            if (hooks.observer)
                hooks.observer(k + 1, state);
            if (track && (k + 1) % config.eval_stride == 0)
                diag.history.push_back({k + 1, evaluator(state.greedy_policy())});
        }
    };
    for (auto len : schedule.lengths) {
        run_episodes(len);
        if (!hooks.skip_rollover)
            state.epoch_rollover();
        ++diag.epochs_completed;
    }
    // The trailing partial epoch ends the run without a rollover.
    run_episodes(schedule.truncation);

    diag.Q = state.Q;
    diag.V = state.V;
    diag.N = state.N;
    return {state.greedy_policy(), std::move(diag)};
}

} // namespace pessiq
