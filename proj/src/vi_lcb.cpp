#include "pessiq/vi_lcb.hpp"

#include <algorithm>
#include <cmath>

namespace pessiq {

EmpiricalModel estimate_model(const BatchDataset& ds) {
    ds.validate();
    EmpiricalModel m;
    m.H = ds.meta.H;
    m.S = ds.meta.S;
    m.A = ds.meta.A;
    m.counts = visit_counts(ds);
    const std::size_t cells = static_cast<std::size_t>(m.H) * m.S * m.A;
    m.P_hat.assign(cells * m.S, 0.0);
    m.r_known.assign(cells, 0.0);

    // Transition counts; the last step has no logged successor.
    std::vector<std::size_t> transitions(cells, 0);
    for (const auto& e : ds.episodes)
        for (int h = 0; h < m.H; ++h) {
            const std::size_t c = (static_cast<std::size_t>(h) * m.S + e.states[h]) * m.A + e.actions[h];
            m.r_known[c] = e.rewards[h];
            if (h + 1 < m.H) {
                m.P_hat[c * m.S + e.states[h + 1]] += 1.0;
                ++transitions[c];
            }
        }
    for (std::size_t c = 0; c < cells; ++c) {
        double* row = m.P_hat.data() + c * m.S;
        if (transitions[c] == 0) {
            std::fill(row, row + m.S, 1.0 / m.S);
        } else {
            const double inv = 1.0 / static_cast<double>(transitions[c]);
            for (int s = 0; s < m.S; ++s)
                row[s] *= inv;
        }
    }
    return m;
}

ViLcbResult train_vi_lcb(const BatchDataset& ds, const TrainConfig& config) {
    config.validate();
    const auto model = estimate_model(ds);
    const int H = model.H, S = model.S, A = model.A;
    const double log_term = iota(S, A, ds.T(), config.delta);
    const double Hd = H;

    ViLcbDiagnostics diag;
    diag.Q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
    diag.V.assign(static_cast<std::size_t>(H + 1) * S, 0.0);
    std::vector<int> greedy(static_cast<std::size_t>(H) * S, 0);

    for (int h = H - 1; h >= 0; --h) {
        const double* next = diag.V.data() + static_cast<std::size_t>(h + 1) * S;
        for (int s = 0; s < S; ++s) {
            int best = 0;
            for (int a = 0; a < A; ++a) {
                const std::size_t c = (static_cast<std::size_t>(h) * S + s) * A + a;
                const auto row = model.row(h, s, a);
                double backup = model.r_known[c];
                for (int sn = 0; sn < S; ++sn)
                    backup += row[sn] * next[sn];
                const double n = static_cast<double>(std::max<std::size_t>(model.counts.N[c], 1));
                const double b = config.c_b * std::sqrt(Hd * Hd * log_term / n);
                diag.Q[c] = std::max(0.0, backup - b);
                if (diag.Q[c] > diag.Q[c - a + best])
                    best = a;
            }
            greedy[static_cast<std::size_t>(h) * S + s] = best;
            diag.V[static_cast<std::size_t>(h) * S + s] = diag.Q[(static_cast<std::size_t>(h) * S + s) * A + best];
        }
    }
    return {Policy::deterministic(H, S, A, std::move(greedy)), std::move(diag)};
}

} // namespace pessiq
