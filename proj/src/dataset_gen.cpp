#include "pessiq/dataset_gen.hpp"

#include <fmt/format.h>
#include <limits>
#include <cstdint>

#include "pessiq/errors.hpp"
#include "pessiq/oracle.hpp"

namespace pessiq {

namespace {

// SplitMix64 finalizer. Episode k of a dataset owns the counter stream
// mix(seed, k), mix(seed, k) + gamma, ... so episodes are independent of
// generation order and cheap to start.
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class EpisodeStream {
public:
    EpisodeStream(std::uint64_t seed, std::uint64_t k) : state_(mix64(mix64(seed) ^ (k * kGamma + kGamma))) {}

    std::uint64_t operator()() { return mix64(state_ += kGamma); }

private:
    std::uint64_t state_;
};

double unit_interval(EpisodeStream& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Inverse CDF in index order. Falls back to the last positive entry when the
// cumulative sum rounds below u.
int sample_categorical(std::span<const double> probs, double u) {
    double cdf = 0.0;
    int last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0)
            continue;
        cdf += probs[i];
        last = static_cast<int>(i);
        if (u < cdf)
            return last;
    }
    return last;
}

} // namespace

Trajectory generate_episode(const TabularMDP& mdp, const Policy& mu, std::uint64_t seed, std::size_t k) {
    const int H = mdp.horizon();
    EpisodeStream gen(seed, static_cast<std::uint64_t>(k));
    Trajectory t;
    t.states.resize(H);
    t.actions.resize(H);
    t.rewards.resize(H);
    int s = sample_categorical(mdp.rho(), unit_interval(gen));
    for (int h = 0; h < H; ++h) {
        const int a = sample_categorical(mu.row(h, s), unit_interval(gen));
        t.states[h] = s;
        t.actions[h] = a;
        t.rewards[h] = mdp.r(h, s, a);
        if (h + 1 < H)
            s = sample_categorical(mdp.P(h, s, a), unit_interval(gen));
    }
    return t;
}

BatchDataset generate_dataset(const TabularMDP& mdp, const Policy& mu, std::size_t K, std::uint64_t seed,
                              std::string behavior_policy_id) {
    if (K < 1)
        throw ValidationError("generate_dataset: K must be at least 1");
    if (!mu.same_shape(mdp.horizon(), mdp.states(), mdp.actions()))
        throw ValidationError("generate_dataset: behavior policy dimensions do not match the MDP");
    BatchDataset ds;
    ds.meta = {mdp.states(), mdp.actions(), mdp.horizon(), K, seed, std::move(behavior_policy_id)};
    ds.episodes.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
        ds.episodes.push_back(generate_episode(mdp, mu, seed, k));
    return ds;
}

CoverageReport coverage_report(const BatchDataset& ds, const TabularMDP& mdp, const Policy& pi_star) {
    if (ds.meta.S != mdp.states() || ds.meta.A != mdp.actions() || ds.meta.H != mdp.horizon())
        throw ValidationError("coverage_report: dataset dimensions do not match the MDP");
    const auto d = occupancy(mdp, pi_star);
    const auto counts = visit_counts(ds);
    CoverageReport rep;
    rep.min_coverage_ratio = std::numeric_limits<double>::infinity();
    const double K = static_cast<double>(ds.meta.K);
    for (int h = 0; h < d.H; ++h)
        for (int s = 0; s < d.S; ++s)
            for (int a = 0; a < d.A; ++a) {
                const double p = d.pair(h, s, a);
                if (p <= 0.0)
                    continue;
                const auto n = counts.at(h, s, a);
                if (n == 0)
                    rep.uncovered.push_back({h, s, a});
                else
                    rep.min_coverage_ratio = std::min(rep.min_coverage_ratio, static_cast<double>(n) / (K * p));
            }
    return rep;
}

} // namespace pessiq
