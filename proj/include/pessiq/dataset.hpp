#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pessiq {

/// One logged episode. All arrays have length H. The state reached after the
/// last step is not recorded: the terminal value layer is identically zero.
struct Trajectory {
    std::vector<int> states;
    std::vector<int> actions;
    std::vector<double> rewards;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct DatasetMeta {
    int S = 0, A = 0, H = 0;
    std::size_t K = 0;
    std::uint64_t seed = 0;
    std::string behavior_policy_id;

    friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct BatchDataset {
    DatasetMeta meta;
    std::vector<Trajectory> episodes;

    /// Total sample count K * H.
    std::size_t T() const { return meta.K * static_cast<std::size_t>(meta.H); }

    /// Throws ValidationError on any length or index inconsistency.
    void validate() const;

    friend bool operator==(const BatchDataset&, const BatchDataset&) = default;
};

struct VisitCounts {
    int H = 0, S = 0, A = 0;
    std::vector<std::size_t> N;  // [(h * S + s) * A + a]

    std::size_t at(int h, int s, int a) const { return N[(static_cast<std::size_t>(h) * S + s) * A + a]; }
};

VisitCounts visit_counts(const BatchDataset& ds);

// JSON Lines: a header object, then one {"k","s","a","r"} object per episode.
void write_dataset(const BatchDataset& ds, std::ostream& out);
void write_dataset(const BatchDataset& ds, const std::string& path);
BatchDataset read_dataset(std::istream& in);
BatchDataset read_dataset(const std::string& path);

} // namespace pessiq
