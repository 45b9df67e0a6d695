#include "pessiq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pessiq/dataset_gen.hpp"
#include "pessiq/errors.hpp"
#include "pessiq/lcb_q_advantage.hpp"
#include "pessiq/oracle.hpp"
#include "pessiq/serialization.hpp"
#include "pessiq/vi_lcb.hpp"

namespace pessiq {

namespace {

using nlohmann::json;

constexpr double kPessimismSlack = 1e-9;

} // namespace

std::string_view algorithm_id(Algorithm algo) {
    switch (algo) {
    case Algorithm::LcbQ: return "lcb_q";
    case Algorithm::LcbQAdvantage: return "lcb_q_advantage";
    case Algorithm::ViLcb: return "vi_lcb";
    }
    return "unknown";
}

std::string_view algorithm_label(Algorithm algo) {
    switch (algo) {
    case Algorithm::LcbQ: return "LCB-Q";
    case Algorithm::LcbQAdvantage: return "LCB-Q-Advantage";
    case Algorithm::ViLcb: return "VI-LCB (Hoeffding)";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view id) {
    for (auto algo : {Algorithm::LcbQ, Algorithm::LcbQAdvantage, Algorithm::ViLcb})
        if (algorithm_id(algo) == id)
            return algo;
    throw ValidationError(fmt::format("unknown algorithm \"{}\" (expected lcb_q, lcb_q_advantage or vi_lcb)", id));
}

LearnerOutput train(Algorithm algo, const BatchDataset& ds, const TrainConfig& config,
                    const PolicyEvaluator& evaluator) {
    switch (algo) {
    case Algorithm::LcbQ: {
        auto res = train_lcb_q(ds, config, evaluator);
        return {std::move(res.policy), std::move(res.diagnostics.V), std::move(res.diagnostics.history)};
    }
    case Algorithm::LcbQAdvantage: {
        auto res = train_lcb_q_advantage(ds, config, evaluator);
        return {std::move(res.policy), std::move(res.diagnostics.V), std::move(res.diagnostics.history)};
    }
    case Algorithm::ViLcb: {
        auto res = train_vi_lcb(ds, config);
        return {std::move(res.policy), std::move(res.diagnostics.V), {}};
    }
    }
    throw ValidationError("unknown algorithm");
}

Policy make_behavior_policy(const TabularMDP& mdp, const std::string& descriptor) {
    const int H = mdp.horizon(), S = mdp.states(), A = mdp.actions();
    if (descriptor == "uniform")
        return Policy::uniform(H, S, A);
    if (descriptor == "optimal")
        return solve_optimal(mdp).policy;
    if (descriptor.rfind("mix:", 0) == 0) {
        double lambda = 0.0;
        try {
            std::size_t used = 0;
            lambda = std::stod(descriptor.substr(4), &used);
            if (used != descriptor.size() - 4)
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ValidationError(fmt::format("behavior \"{}\": cannot parse mixture weight", descriptor));
        }
        return mix_policies(solve_optimal(mdp).policy, Policy::uniform(H, S, A), lambda);
    }
    Policy pi = read_policy(descriptor);
    if (pi.horizon() != H || pi.states() != S || pi.actions() > A)
        throw ValidationError(fmt::format("behavior file {} is {}x{}x{}, MDP is H={} S={} A={}", descriptor, pi.horizon(),
                                          pi.states(), pi.actions(), H, S, A));
    return with_action_count(pi, A);
}

void ExperimentConfig::validate() const {
    if (mdp_family != "chain" && mdp_family != "random" && mdp_family != "file")
        throw ValidationError(fmt::format("mdp_family must be chain, random or file, got \"{}\"", mdp_family));
    if (mdp_family == "file" && mdp_path.empty())
        throw ValidationError("mdp_family \"file\" requires mdp_path");
    if (mdp_family == "chain" && A != 2)
        throw ValidationError("the chain family has exactly A = 2 actions");
    if (K.empty())
        throw ValidationError("K list must not be empty");
    if (seeds.empty())
        throw ValidationError("seeds list must not be empty");
    if (algorithms.empty())
        throw ValidationError("algorithms list must not be empty");
    for (auto k : K)
        if (k < 1)
            throw ValidationError("every K must be at least 1");
    train.validate();
}

namespace {

template <typename T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("config field \"{}\": {}", key, e.what()));
    }
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ValidationError("config: expected a flat JSON object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        if (key == "mdp_family") c.mdp_family = field<std::string>(j, k);
        else if (key == "S") c.S = field<int>(j, k);
        else if (key == "A") c.A = field<int>(j, k);
        else if (key == "H") c.H = field<int>(j, k);
        else if (key == "slip") c.slip = field<double>(j, k);
        else if (key == "sparsity") c.sparsity = field<double>(j, k);
        else if (key == "mdp_seed") c.mdp_seed = field<std::uint64_t>(j, k);
        else if (key == "mdp_path") c.mdp_path = field<std::string>(j, k);
        else if (key == "behavior") c.behavior = field<std::string>(j, k);
        else if (key == "K") c.K = field<std::vector<std::size_t>>(j, k);
        else if (key == "seeds") c.seeds = field<std::vector<std::uint64_t>>(j, k);
        else if (key == "algorithms") {
            c.algorithms.clear();
            for (const auto& id : field<std::vector<std::string>>(j, k))
                c.algorithms.push_back(parse_algorithm(id));
        }
        else if (key == "c_b") c.train.c_b = field<double>(j, k);
        else if (key == "delta") c.train.delta = field<double>(j, k);
        else if (key == "record_history") c.train.record_history = field<bool>(j, k);
        else if (key == "eval_stride") c.train.eval_stride = field<std::size_t>(j, k);
        else if (key == "out_dir") c.out_dir = field<std::string>(j, k);
        else throw ValidationError(fmt::format("config: unknown key \"{}\"", key));
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    auto config = parse_experiment_config(read_text_file(path));
    // A relative mdp_path is resolved against the config file's directory.
    if (config.mdp_family == "file" && std::filesystem::path(config.mdp_path).is_relative())
        config.mdp_path = (std::filesystem::path(path).parent_path() / config.mdp_path).string();
    return config;
}

TabularMDP build_mdp(const ExperimentConfig& config) {
    if (config.mdp_family == "chain")
        return make_chain_mdp(config.S, config.H, config.slip);
    if (config.mdp_family == "random")
        return make_random_mdp(config.S, config.A, config.H, config.sparsity, config.mdp_seed);
    return read_mdp(config.mdp_path);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config, unsigned jobs) {
    config.validate();
    const TabularMDP mdp = build_mdp(config);
    require_valid(mdp);
    const auto optimal = solve_optimal(mdp);
    const Policy mu = make_behavior_policy(mdp, config.behavior);
    const double c_star = concentrability(mdp, mu, optimal.policy).c_star;
    const int H = mdp.horizon(), S = mdp.states();

    const std::size_t nK = config.K.size(), nSeeds = config.seeds.size(), nAlgo = config.algorithms.size();
    std::vector<RunRecord> records(nAlgo * nK * nSeeds);
    const PolicyEvaluator evaluator = [&](const Policy& p) { return suboptimality(mdp, p, optimal.values); };

    // One work item per (K, seed): the dataset is drawn once and shared.
    auto work = [&](std::size_t item) {
        const std::size_t ki = item / nSeeds, si = item % nSeeds;
        const std::size_t K = config.K[ki];
        const std::uint64_t seed = config.seeds[si];
        const auto ds = generate_dataset(mdp, mu, K, seed, config.behavior);
        for (std::size_t ai = 0; ai < nAlgo; ++ai) {
            const auto algo = config.algorithms[ai];
            const auto start = std::chrono::steady_clock::now();
            auto out = train(algo, ds, config.train, evaluator);
            const auto stop = std::chrono::steady_clock::now();

            RunRecord& rec = records[(ai * nK + ki) * nSeeds + si];
            rec.algorithm = algo;
            rec.K = K;
            rec.T = ds.T();
            rec.seed = seed;
            rec.c_b = config.train.c_b;
            rec.delta = config.train.delta;
            rec.c_star = c_star;
            rec.suboptimality = suboptimality(mdp, out.policy, optimal.values);
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            rec.pessimism_violation = false;
            for (int h = 0; h < H && !rec.pessimism_violation; ++h)
                for (int s = 0; s < S; ++s)
                    if (out.V[static_cast<std::size_t>(h) * S + s] > optimal.values.v(h, s) + kPessimismSlack) {
                        rec.pessimism_violation = true;
                        break;
                    }
            rec.history = std::move(out.history);
        }
    };

    const std::size_t items = nK * nSeeds;
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(items)));
    if (threads == 1) {
        for (std::size_t i = 0; i < items; ++i)
            work(i);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < items;) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = items;
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
    return records;
}

void write_results_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << kResultsCsvHeader << '\n';
    for (const auto& r : records)
        out << fmt::format("{},{},{},{},{},{},{},{},{:.3f},{}\n", algorithm_id(r.algorithm), r.K, r.T, r.seed, r.c_b,
                           r.delta, r.c_star, r.suboptimality, r.wall_time_ms, r.pessimism_violation ? 1 : 0);
    if (!out)
        throw IoError("failed writing results CSV");
}

void write_results_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    write_results_csv(records, out);
}

std::vector<RunRecord> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultsCsvHeader)
        throw ValidationError("results CSV: unexpected header");
    std::vector<RunRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (cells.size() != 10)
            throw ValidationError(fmt::format("results CSV line {}: expected 10 columns, got {}", lineno, cells.size()));
        try {
            RunRecord r;
            r.algorithm = parse_algorithm(cells[0]);
            r.K = std::stoull(cells[1]);
            r.T = std::stoull(cells[2]);
            r.seed = std::stoull(cells[3]);
            r.c_b = std::stod(cells[4]);
            r.delta = std::stod(cells[5]);
            r.c_star = std::stod(cells[6]);
            r.suboptimality = std::stod(cells[7]);
            r.wall_time_ms = std::stod(cells[8]);
            r.pessimism_violation = cells[9] == "1";
            records.push_back(std::move(r));
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw ValidationError(fmt::format("results CSV line {}: {}", lineno, e.what()));
        }
    }
    return records;
}

std::vector<RunRecord> read_results_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    return read_results_csv(in);
}

void write_history_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << "algorithm,K,seed,episode,suboptimality\n";
    for (const auto& r : records)
        for (const auto& p : r.history)
            out << fmt::format("{},{},{},{},{}\n", algorithm_id(r.algorithm), r.K, r.seed, p.episode, p.suboptimality);
}

SlopeFit fit_loglog_slope(const std::vector<double>& T, const std::vector<double>& gap) {
    if (T.size() != gap.size())
        throw ValidationError("fit_loglog_slope: T and gap differ in length");
    SlopeFit fit;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (!(gap[i] > 0.0)) {
            ++fit.excluded_zero;
            continue;
        }
        x.push_back(std::log(T[i]));
        y.push_back(std::log(gap[i]));
    }
    fit.points = x.size();
    if (x.size() < 2) {
        fit.slope = fit.intercept = fit.residual = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

double median(std::vector<double> values) {
    if (values.empty())
        throw ValidationError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<ScalingReport> scaling_sweep(const std::vector<RunRecord>& records, std::size_t min_k,
                                         std::size_t min_seeds) {
    std::vector<Algorithm> order;
    std::map<Algorithm, std::map<std::size_t, std::vector<const RunRecord*>>> groups;
    for (const auto& r : records) {
        if (!groups.contains(r.algorithm))
            order.push_back(r.algorithm);
        groups[r.algorithm][r.K].push_back(&r);
    }
    std::vector<ScalingReport> reports;
    for (auto algo : order) {
        const auto& byK = groups[algo];
        if (byK.size() < min_k)
            throw ValidationError(fmt::format("scaling sweep for {} needs at least {} K values, got {}",
                                              algorithm_id(algo), min_k, byK.size()));
        ScalingReport rep{algo, {}, {}};
        std::vector<double> Ts, gaps;
        for (const auto& [K, runs] : byK) {
            if (runs.size() < min_seeds)
                throw ValidationError(fmt::format("scaling sweep for {} at K={} needs at least {} seeds, got {}",
                                                  algorithm_id(algo), K, min_seeds, runs.size()));
            std::vector<double> g;
            for (const auto* r : runs)
                g.push_back(r->suboptimality);
            const double med = median(std::move(g));
            rep.points.push_back({K, runs.front()->T, med, runs.size()});
            Ts.push_back(static_cast<double>(runs.front()->T));
            gaps.push_back(med);
        }
        rep.fit = fit_loglog_slope(Ts, gaps);
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::string format_scaling_report(const std::vector<ScalingReport>& reports) {
    std::string out;
    for (const auto& rep : reports) {
        out += fmt::format("{} [{}]\n", algorithm_id(rep.algorithm), algorithm_label(rep.algorithm));
        for (const auto& p : rep.points)
            out += fmt::format("  K={:<8} T={:<9} median_gap={:.6g} seeds={}\n", p.K, p.T, p.median_gap, p.seeds);
        out += fmt::format("  slope={:.4f} intercept={:.4f} residual={:.4f} points={} excluded_zero={}\n",
                           rep.fit.slope, rep.fit.intercept, rep.fit.residual, rep.fit.points, rep.fit.excluded_zero);
    }
    return out;
}

} // namespace pessiq
