#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pessiq/dataset.hpp"
#include "pessiq/lcb_q.hpp"
#include "pessiq/mdp.hpp"
#include "pessiq/policy.hpp"

namespace pessiq {

enum class Algorithm { LcbQ, LcbQAdvantage, ViLcb };

std::string_view algorithm_id(Algorithm algo);
/// Human-readable label; the model-based baseline is tagged as Hoeffding.
std::string_view algorithm_label(Algorithm algo);
Algorithm parse_algorithm(std::string_view id);

/// What every learner hands back to the harness.
struct LearnerOutput {
    Policy policy;
    std::vector<double> V;  // [h * S + s], h in [0, H]
    std::vector<HistoryPoint> history;
};

LearnerOutput train(Algorithm algo, const BatchDataset& ds, const TrainConfig& config,
                    const PolicyEvaluator& evaluator = {});

/// Behavior descriptors: "mix:<lambda>" (lambda pi* + (1 - lambda) uniform),
/// "uniform", "optimal", or a path to a policy-v1 file.
Policy make_behavior_policy(const TabularMDP& mdp, const std::string& descriptor);

struct ExperimentConfig {
    std::string mdp_family = "chain";  // chain | random | file
    int S = 5;
    int A = 2;
    int H = 4;
    double slip = 0.2;
    double sparsity = 1.0;
    std::uint64_t mdp_seed = 0;
    std::string mdp_path;
    std::string behavior = "mix:0.5";
    std::vector<std::size_t> K{1024};
    std::vector<std::uint64_t> seeds{0};
    std::vector<Algorithm> algorithms{Algorithm::LcbQ, Algorithm::LcbQAdvantage, Algorithm::ViLcb};
    TrainConfig train;
    std::string out_dir = ".";

    void validate() const;
};

/// Flat JSON object; unknown keys and wrong types are ValidationErrors.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

TabularMDP build_mdp(const ExperimentConfig& config);

struct RunRecord {
    Algorithm algorithm = Algorithm::LcbQ;
    std::size_t K = 0;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    double c_b = 0.0;
    double delta = 0.0;
    double c_star = 0.0;
    double suboptimality = 0.0;
    double wall_time_ms = 0.0;
    bool pessimism_violation = false;
    std::vector<HistoryPoint> history;
};

inline constexpr std::string_view kResultsCsvHeader =
    "algorithm,K,T,seed,c_b,delta,c_star,suboptimality,wall_time_ms,pessimism_violation";

/// One record per (algorithm, K, seed) in that lexicographic order of the
/// config lists. Runs execute on up to `jobs` threads; the dataset for
/// (K, seed) is shared across algorithms.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

void write_results_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_results_csv(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_results_csv(std::istream& in);
std::vector<RunRecord> read_results_csv(const std::string& path);
/// algorithm,K,seed,episode,suboptimality for runs that recorded history.
void write_history_csv(const std::vector<RunRecord>& records, std::ostream& out);

/// Least-squares fit of log(gap) against log(T). Points with gap <= 0 are
/// left out and counted.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of the log-space residuals
    std::size_t points = 0;
    std::size_t excluded_zero = 0;
};

SlopeFit fit_loglog_slope(const std::vector<double>& T, const std::vector<double>& gap);

struct ScalingPoint {
    std::size_t K;
    std::size_t T;
    double median_gap;
    std::size_t seeds;
};

struct ScalingReport {
    Algorithm algorithm;
    std::vector<ScalingPoint> points;
    SlopeFit fit;
};

double median(std::vector<double> values);

/// Groups records by algorithm and K and fits the median gap against T.
/// Requires at least min_k distinct K values and min_seeds runs per K.
std::vector<ScalingReport> scaling_sweep(const std::vector<RunRecord>& records, std::size_t min_k = 4,
                                         std::size_t min_seeds = 10);

std::string format_scaling_report(const std::vector<ScalingReport>& reports);

} // namespace pessiq
