#include "pessiq/oracle.hpp"

#include <fmt/format.h>

#include "pessiq/errors.hpp"

namespace pessiq {

namespace {

void check_policy(const TabularMDP& mdp, const Policy& pi, const char* what) {
    if (!pi.same_shape(mdp.horizon(), mdp.states(), mdp.actions()))
        throw ValidationError(fmt::format("{}: policy is {}x{}x{} but MDP is H={} S={} A={}", what, pi.horizon(),
                                          pi.states(), pi.actions(), mdp.horizon(), mdp.states(), mdp.actions()));
}

ValueTables empty_tables(const TabularMDP& mdp) {
    ValueTables t;
    t.H = mdp.horizon();
    t.S = mdp.states();
    t.A = mdp.actions();
    t.V.assign(static_cast<std::size_t>(t.H + 1) * t.S, 0.0);
    t.Q.assign(static_cast<std::size_t>(t.H) * t.S * t.A, 0.0);
    return t;
}

// r + P V_{h+1}
double backup(const TabularMDP& mdp, const ValueTables& t, int h, int s, int a) {
    const auto row = mdp.P(h, s, a);
    const double* next = t.V.data() + static_cast<std::size_t>(h + 1) * t.S;
    double q = mdp.r(h, s, a);
    for (int sn = 0; sn < t.S; ++sn)
        q += row[sn] * next[sn];
    return q;
}

} // namespace

double ValueTables::initial_value(std::span<const double> rho) const {
    double v = 0.0;
    for (int s = 0; s < S; ++s)
        v += rho[s] * V[s];
    return v;
}

ValueTables evaluate_policy(const TabularMDP& mdp, const Policy& pi) {
    check_policy(mdp, pi, "evaluate_policy");
    ValueTables t = empty_tables(mdp);
    for (int h = t.H - 1; h >= 0; --h)
        for (int s = 0; s < t.S; ++s) {
            double v = 0.0;
            for (int a = 0; a < t.A; ++a) {
                const double q = backup(mdp, t, h, s, a);
                t.Q[(static_cast<std::size_t>(h) * t.S + s) * t.A + a] = q;
                const double w = pi.prob(h, s, a);
                if (w != 0.0)
                    v += w * q;
            }
            t.V[static_cast<std::size_t>(h) * t.S + s] = v;
        }
    return t;
}

OptimalSolution solve_optimal(const TabularMDP& mdp) {
    ValueTables t = empty_tables(mdp);
    std::vector<int> greedy(static_cast<std::size_t>(t.H) * t.S, 0);
    for (int h = t.H - 1; h >= 0; --h)
        for (int s = 0; s < t.S; ++s) {
            int best = 0;
            double best_q = 0.0;
            for (int a = 0; a < t.A; ++a) {
                const double q = backup(mdp, t, h, s, a);
                t.Q[(static_cast<std::size_t>(h) * t.S + s) * t.A + a] = q;
                if (a == 0 || q > best_q) {
                    best = a;
                    best_q = q;
                }
            }
            t.V[static_cast<std::size_t>(h) * t.S + s] = best_q;
            greedy[static_cast<std::size_t>(h) * t.S + s] = best;
        }
    return {std::move(t), Policy::deterministic(mdp.horizon(), mdp.states(), mdp.actions(), std::move(greedy))};
}

OccupancyTable occupancy(const TabularMDP& mdp, const Policy& pi) {
    check_policy(mdp, pi, "occupancy");
    OccupancyTable d;
    d.H = mdp.horizon();
    d.S = mdp.states();
    d.A = mdp.actions();
    d.d_s.assign(static_cast<std::size_t>(d.H) * d.S, 0.0);
    d.d_sa.assign(static_cast<std::size_t>(d.H) * d.S * d.A, 0.0);
    std::copy(mdp.rho().begin(), mdp.rho().end(), d.d_s.begin());
    for (int h = 0; h < d.H; ++h)
        for (int s = 0; s < d.S; ++s) {
            const double ds = d.d_s[static_cast<std::size_t>(h) * d.S + s];
            for (int a = 0; a < d.A; ++a) {
                const double dsa = ds * pi.prob(h, s, a);
                d.d_sa[(static_cast<std::size_t>(h) * d.S + s) * d.A + a] = dsa;
                if (h + 1 < d.H && dsa != 0.0) {
                    const auto row = mdp.P(h, s, a);
                    double* next = d.d_s.data() + static_cast<std::size_t>(h + 1) * d.S;
                    for (int sn = 0; sn < d.S; ++sn)
                        next[sn] += dsa * row[sn];
                }
            }
        }
    return d;
}

ConcentrabilityReport concentrability(const TabularMDP& mdp, const Policy& mu, const Policy& pi_star) {
    const auto d_star = occupancy(mdp, pi_star);
    const auto d_mu = occupancy(mdp, mu);
    ConcentrabilityReport rep;
    rep.ratio_table.assign(d_star.d_sa.size(), 0.0);
    for (int h = 0; h < d_star.H; ++h)
        for (int s = 0; s < d_star.S; ++s)
            for (int a = 0; a < d_star.A; ++a) {
                const std::size_t i = (static_cast<std::size_t>(h) * d_star.S + s) * d_star.A + a;
                const double num = d_star.d_sa[i];
                const double den = d_mu.d_sa[i];
                double ratio = 0.0;
                if (num > 0.0)
                    ratio = den > 0.0 ? num / den : kInfiniteConcentrability;
                rep.ratio_table[i] = ratio;
                if (ratio > rep.c_star) {
                    rep.c_star = ratio;
                    rep.argmax = {h, s, a};
                }
            }
    return rep;
}

double suboptimality(const TabularMDP& mdp, const Policy& pi_hat, const ValueTables& optimal) {
    const auto values = evaluate_policy(mdp, pi_hat);
    double gap = 0.0;
    for (int s = 0; s < mdp.states(); ++s)
        gap += mdp.rho()[s] * (optimal.v(0, s) - values.v(0, s));
    return gap;
}

double suboptimality(const TabularMDP& mdp, const Policy& pi_hat) {
    return suboptimality(mdp, pi_hat, solve_optimal(mdp).values);
}

} // namespace pessiq
