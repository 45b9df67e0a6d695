#include "pessiq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <random>

#include "pessiq/errors.hpp"

namespace pessiq {

TabularMDP::TabularMDP(int S, int A, int H, std::vector<double> P, std::vector<double> r, std::vector<double> rho)
    : S_(S), A_(A), H_(H), P_(std::move(P)), r_(std::move(r)), rho_(std::move(rho)) {
    if (S < 1 || A < 1 || H < 1)
        throw ValidationError(fmt::format("MDP dimensions must be positive (S={}, A={}, H={})", S, A, H));
    const std::size_t cells = static_cast<std::size_t>(H) * S * A;
    if (P_.size() != cells * S)
        throw ValidationError(fmt::format("P has {} entries, expected {}", P_.size(), cells * S));
    if (r_.size() != cells)
        throw ValidationError(fmt::format("r has {} entries, expected {}", r_.size(), cells));
    if (rho_.size() != static_cast<std::size_t>(S))
        throw ValidationError(fmt::format("rho has {} entries, expected {}", rho_.size(), S));
}

ValidationReport validate_mdp(const TabularMDP& mdp) {
    ValidationReport report;
    auto& out = report.violations;
    const int S = mdp.states(), A = mdp.actions(), H = mdp.horizon();
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const auto row = mdp.P(h, s, a);
                double sum = 0.0;
                for (int sn = 0; sn < S; ++sn) {
                    if (!(row[sn] >= 0.0))
                        out.push_back(fmt::format("P[{}][{}][{}][{}] = {} is negative", h, s, a, sn, row[sn]));
                    sum += row[sn];
                }
                if (!(std::abs(sum - 1.0) <= kProbabilityTolerance))
                    out.push_back(fmt::format("P[{}][{}][{}] sums to {} (deviation {:.3g})", h, s, a, sum,
                                              sum - 1.0));
                const double reward = mdp.r(h, s, a);
                if (!(reward >= 0.0 && reward <= 1.0))
                    out.push_back(fmt::format("r[{}][{}][{}] outside [0,1]: {}", h, s, a, reward));
            }
    double sum = 0.0;
    for (int s = 0; s < S; ++s) {
        if (!(mdp.rho()[s] >= 0.0))
            out.push_back(fmt::format("rho[{}] = {} is negative", s, mdp.rho()[s]));
        sum += mdp.rho()[s];
    }
    if (!(std::abs(sum - 1.0) <= kProbabilityTolerance))
        out.push_back(fmt::format("rho sums to {} (deviation {:.3g})", sum, sum - 1.0));
    return report;
}

void require_valid(const TabularMDP& mdp) {
    const auto report = validate_mdp(mdp);
    if (report.ok())
        return;
    std::string msg = "invalid MDP:";
    for (const auto& v : report.violations)
        msg += "\n  " + v;
    throw ValidationError(msg);
}

namespace {

// Uniform on [0, 1) from the top 53 bits.
double unit_interval(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Divides by the sum, then folds the rounding residue into the largest entry.
void normalize(std::span<double> row) {
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (auto& p : row)
        p /= sum;
    const double residue = 1.0 - std::accumulate(row.begin(), row.end(), 0.0);
    *std::max_element(row.begin(), row.end()) += residue;
}

} // namespace

TabularMDP make_random_mdp(int S, int A, int H, double sparsity, std::uint64_t seed) {
    if (S < 1 || A < 1 || H < 1)
        throw ValidationError(fmt::format("make_random_mdp: dimensions must be positive (S={}, A={}, H={})", S, A, H));
    if (!(sparsity > 0.0 && sparsity <= 1.0))
        throw ValidationError(fmt::format("make_random_mdp: sparsity {} outside (0,1]", sparsity));

    std::mt19937_64 gen(seed);
    const int support = std::clamp(static_cast<int>(std::ceil(sparsity * S - 1e-12)), 1, S);
    const std::size_t cells = static_cast<std::size_t>(H) * S * A;
    std::vector<double> P(cells * S, 0.0);
    std::vector<double> r(cells);
    std::vector<int> order(S);

    for (std::size_t c = 0; c < cells; ++c) {
        // Partial Fisher-Yates picks `support` distinct successors.
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < support; ++i) {
            const int j = i + static_cast<int>(unit_interval(gen) * (S - i));
            std::swap(order[i], order[std::min(j, S - 1)]);
        }
        std::span<double> row(P.data() + c * S, S);
        for (int i = 0; i < support; ++i)
            row[order[i]] = 1.0 - unit_interval(gen);  // (0, 1]
        normalize(row);
        r[c] = unit_interval(gen);
    }
    std::vector<double> rho(S, 1.0 / S);
    normalize(rho);
    return TabularMDP(S, A, H, std::move(P), std::move(r), std::move(rho));
}

TabularMDP make_chain_mdp(int S, int H, double slip) {
    if (S < 2)
        throw ValidationError(fmt::format("make_chain_mdp: need S >= 2, got {}", S));
    if (H < 1)
        throw ValidationError(fmt::format("make_chain_mdp: need H >= 1, got {}", H));
    if (!(slip >= 0.0 && slip <= 0.5))
        throw ValidationError(fmt::format("make_chain_mdp: slip {} outside [0,0.5]", slip));

    constexpr int A = 2;
    const std::size_t cells = static_cast<std::size_t>(H) * S * A;
    std::vector<double> P(cells * S, 0.0);
    std::vector<double> r(cells, 0.0);
    auto at = [&](int h, int s, int a) { return (static_cast<std::size_t>(h) * S + s) * A + a; };

    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            P[at(h, s, chain::kLeft) * S + 0] = 1.0;
            double* right = &P[at(h, s, chain::kRight) * S];
            if (s == S - 1) {
                right[s] = 1.0;
            } else {
                right[s + 1] += 1.0 - slip;
                right[s] += slip;
            }
            if (h == H - 1)
                r[at(h, s, chain::kRight)] = right[S - 1];
        }
    std::vector<double> rho(S, 0.0);
    rho[0] = 1.0;
    return TabularMDP(S, A, H, std::move(P), std::move(r), std::move(rho));
}

} // namespace pessiq
