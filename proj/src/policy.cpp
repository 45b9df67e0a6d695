#include "pessiq/policy.hpp"

#include <cmath>
#include <fmt/format.h>

#include "pessiq/errors.hpp"

namespace pessiq {

namespace {

void check_dims(int H, int S, int A) {
    if (H < 1 || S < 1 || A < 1)
        throw ValidationError(fmt::format("policy dimensions must be positive (H={}, S={}, A={})", H, S, A));
}

} // namespace

Policy Policy::deterministic(int H, int S, int A, std::vector<int> table) {
    check_dims(H, S, A);
    const std::size_t rows = static_cast<std::size_t>(H) * S;
    if (table.size() != rows)
        throw ValidationError(fmt::format("deterministic policy table has {} entries, expected {}", table.size(), rows));
    Policy pi(PolicyKind::Deterministic, H, S, A);
    pi.probs_.assign(rows * A, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        if (table[i] < 0 || table[i] >= A)
            throw ValidationError(fmt::format("policy[{}][{}] = {} out of range [0,{})", i / S, i % S, table[i], A));
        pi.probs_[i * A + table[i]] = 1.0;
    }
    pi.actions_ = std::move(table);
    return pi;
}

Policy Policy::stochastic(int H, int S, int A, std::vector<double> probs) {
    check_dims(H, S, A);
    const std::size_t rows = static_cast<std::size_t>(H) * S;
    if (probs.size() != rows * A)
        throw ValidationError(fmt::format("stochastic policy has {} entries, expected {}", probs.size(), rows * A));
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (int a = 0; a < A; ++a) {
            const double p = probs[i * A + a];
            if (!(p >= 0.0))
                throw ValidationError(fmt::format("policy[{}][{}][{}] = {} is negative", i / S, i % S, a, p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbabilityTolerance)
            throw ValidationError(fmt::format("policy[{}][{}] sums to {:.17g}", i / S, i % S, sum));
    }
    Policy pi(PolicyKind::Stochastic, H, S, A);
    pi.probs_ = std::move(probs);
    return pi;
}

Policy Policy::uniform(int H, int S, int A) {
    check_dims(H, S, A);
    return stochastic(H, S, A, std::vector<double>(static_cast<std::size_t>(H) * S * A, 1.0 / A));
}

Policy Policy::constant(int H, int S, int A, int action) {
    check_dims(H, S, A);
    return deterministic(H, S, A, std::vector<int>(static_cast<std::size_t>(H) * S, action));
}

int Policy::action(int h, int s) const {
    if (kind_ != PolicyKind::Deterministic)
        throw ValidationError("action() called on a stochastic policy");
    return actions_[index(h, s)];
}

Policy mix_policies(const Policy& base, const Policy& other, double lambda) {
    if (!other.same_shape(base.horizon(), base.states(), base.actions()))
        throw ValidationError("mix_policies: policies have different dimensions");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ValidationError(fmt::format("mix_policies: lambda = {} outside [0,1]", lambda));
    const auto& p = base.prob_table();
    const auto& q = other.prob_table();
    std::vector<double> mixed(p.size());
    // Written as a correction to base so equal inputs come back bit-exact.
    for (std::size_t i = 0; i < p.size(); ++i)
        mixed[i] = lambda == 0.0 ? q[i] : p[i] + (1.0 - lambda) * (q[i] - p[i]);
    return Policy::stochastic(base.horizon(), base.states(), base.actions(), std::move(mixed));
}

} // namespace pessiq
