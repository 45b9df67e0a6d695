#include "pessiq/pessiq.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>

#include "pessiq/dataset.hpp"
#include "pessiq/dataset_gen.hpp"
#include "pessiq/errors.hpp"
#include "pessiq/harness.hpp"
#include "pessiq/mdp.hpp"
#include "pessiq/oracle.hpp"
#include "pessiq/serialization.hpp"

struct pessiq_mdp {
    pessiq::TabularMDP value;
};
struct pessiq_policy {
    pessiq::Policy value;
};
struct pessiq_dataset {
    pessiq::BatchDataset value;
};

namespace {

thread_local std::string g_last_error;

pessiq_status fail(pessiq_status code, const char* msg) {
    g_last_error = msg;
    return code;
}

// Maps exceptions escaping the core onto status codes.
template <typename F>
pessiq_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return PESSIQ_OK;
    } catch (const pessiq::ValidationError& e) {
        return fail(PESSIQ_ERR_VALIDATION, e.what());
    } catch (const std::out_of_range& e) {
        return fail(PESSIQ_ERR_VALIDATION, e.what());
    } catch (const pessiq::IoError& e) {
        return fail(PESSIQ_ERR_IO, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(PESSIQ_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PESSIQ_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PESSIQ_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PESSIQ_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* name) {
    if (p == nullptr)
        throw pessiq::ValidationError(std::string(name) + " must not be NULL");
}

pessiq::TrainConfig to_config(const pessiq_train_config* c) {
    pessiq::TrainConfig config;
    if (c != nullptr) {
        config.c_b = c->c_b;
        config.delta = c->delta;
    }
    return config;
}

} // namespace

extern "C" {

const char* pessiq_version(void) {
    return "0.1.0";
}

const char* pessiq_last_error(void) {
    return g_last_error.c_str();
}

void pessiq_train_config_default(pessiq_train_config* config) {
    if (config == nullptr)
        return;
    const pessiq::TrainConfig defaults;
    config->c_b = defaults.c_b;
    config->delta = defaults.delta;
}

pessiq_status pessiq_mdp_chain(int S, int H, double slip, pessiq_mdp** out) {
    return guarded([&] {
        require(out, "out");
        *out = new pessiq_mdp{pessiq::make_chain_mdp(S, H, slip)};
    });
}

pessiq_status pessiq_mdp_random(int S, int A, int H, double sparsity, uint64_t seed, pessiq_mdp** out) {
    return guarded([&] {
        require(out, "out");
        *out = new pessiq_mdp{pessiq::make_random_mdp(S, A, H, sparsity, seed)};
    });
}

pessiq_status pessiq_mdp_read(const char* path, pessiq_mdp** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new pessiq_mdp{pessiq::read_mdp(path)};
    });
}

pessiq_status pessiq_mdp_write(const pessiq_mdp* mdp, const char* path) {
    return guarded([&] {
        require(mdp, "mdp");
        require(path, "path");
        pessiq::write_mdp(mdp->value, path);
    });
}

pessiq_status pessiq_mdp_dims(const pessiq_mdp* mdp, int* S, int* A, int* H) {
    return guarded([&] {
        require(mdp, "mdp");
        if (S) *S = mdp->value.states();
        if (A) *A = mdp->value.actions();
        if (H) *H = mdp->value.horizon();
    });
}

pessiq_status pessiq_mdp_optimal_value(const pessiq_mdp* mdp, double* out) {
    return guarded([&] {
        require(mdp, "mdp");
        require(out, "out");
        *out = pessiq::solve_optimal(mdp->value).values.initial_value(mdp->value.rho());
    });
}

void pessiq_mdp_free(pessiq_mdp* mdp) {
    delete mdp;
}

pessiq_status pessiq_policy_behavior(const pessiq_mdp* mdp, const char* descriptor, pessiq_policy** out) {
    return guarded([&] {
        require(mdp, "mdp");
        require(descriptor, "descriptor");
        require(out, "out");
        *out = new pessiq_policy{pessiq::make_behavior_policy(mdp->value, descriptor)};
    });
}

pessiq_status pessiq_policy_read(const char* path, pessiq_policy** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new pessiq_policy{pessiq::read_policy(path)};
    });
}

pessiq_status pessiq_policy_write(const pessiq_policy* policy, const char* path) {
    return guarded([&] {
        require(policy, "policy");
        require(path, "path");
        pessiq::write_policy(policy->value, path);
    });
}

pessiq_status pessiq_policy_info(const pessiq_policy* policy, int* H, int* S, int* A, int* deterministic) {
    return guarded([&] {
        require(policy, "policy");
        if (H) *H = policy->value.horizon();
        if (S) *S = policy->value.states();
        if (A) *A = policy->value.actions();
        if (deterministic) *deterministic = policy->value.is_deterministic() ? 1 : 0;
    });
}

pessiq_status pessiq_policy_action(const pessiq_policy* policy, int h, int s, int* action) {
    return guarded([&] {
        require(policy, "policy");
        require(action, "action");
        const auto& p = policy->value;
        if (h < 0 || h >= p.horizon() || s < 0 || s >= p.states())
            throw std::out_of_range("pessiq_policy_action: (h, s) out of range");
        *action = p.action(h, s);
    });
}

void pessiq_policy_free(pessiq_policy* policy) {
    delete policy;
}

pessiq_status pessiq_dataset_generate(const pessiq_mdp* mdp, const pessiq_policy* behavior,
                                      const char* behavior_id, uint64_t K, uint64_t seed, pessiq_dataset** out) {
    return guarded([&] {
        require(mdp, "mdp");
        require(behavior, "behavior");
        require(out, "out");
        *out = new pessiq_dataset{
            pessiq::generate_dataset(mdp->value, behavior->value, K, seed, behavior_id ? behavior_id : "")};
    });
}

pessiq_status pessiq_dataset_read(const char* path, pessiq_dataset** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new pessiq_dataset{pessiq::read_dataset(std::string(path))};
    });
}

pessiq_status pessiq_dataset_write(const pessiq_dataset* ds, const char* path) {
    return guarded([&] {
        require(ds, "dataset");
        require(path, "path");
        pessiq::write_dataset(ds->value, std::string(path));
    });
}

pessiq_status pessiq_dataset_dims(const pessiq_dataset* ds, int* S, int* A, int* H, uint64_t* K) {
    return guarded([&] {
        require(ds, "dataset");
        const auto& m = ds->value.meta;
        if (S) *S = m.S;
        if (A) *A = m.A;
        if (H) *H = m.H;
        if (K) *K = m.K;
    });
}

void pessiq_dataset_free(pessiq_dataset* ds) {
    delete ds;
}

pessiq_status pessiq_train(const pessiq_dataset* ds, const char* algorithm, const pessiq_train_config* config,
                           pessiq_policy** out) {
    return guarded([&] {
        require(ds, "dataset");
        require(algorithm, "algorithm");
        require(out, "out");
        auto result = pessiq::train(pessiq::parse_algorithm(algorithm), ds->value, to_config(config));
        *out = new pessiq_policy{std::move(result.policy)};
    });
}

pessiq_status pessiq_suboptimality(const pessiq_mdp* mdp, const pessiq_policy* policy, double* out) {
    return guarded([&] {
        require(mdp, "mdp");
        require(policy, "policy");
        require(out, "out");
        *out = pessiq::suboptimality(mdp->value, pessiq::with_action_count(policy->value, mdp->value.actions()));
    });
}

pessiq_status pessiq_concentrability(const pessiq_mdp* mdp, const pessiq_policy* behavior, double* out) {
    return guarded([&] {
        require(mdp, "mdp");
        require(behavior, "behavior");
        require(out, "out");
        const auto mu = pessiq::with_action_count(behavior->value, mdp->value.actions());
        *out = pessiq::concentrability(mdp->value, mu, pessiq::solve_optimal(mdp->value).policy).c_star;
    });
}

pessiq_status pessiq_sweep(const char* config_path, unsigned jobs, const char* out_csv) {
    return guarded([&] {
        require(config_path, "config_path");
        const auto config = pessiq::load_experiment_config(config_path);
        const auto records = pessiq::run_experiment(config, jobs);
        std::filesystem::path csv = out_csv ? std::filesystem::path(out_csv)
                                            : std::filesystem::path(config.out_dir) / "results.csv";
        if (!out_csv)
            std::filesystem::create_directories(config.out_dir);
        pessiq::write_results_csv(records, csv.string());
        if (config.train.record_history) {
            auto history_path = csv;
            history_path.replace_filename(csv.stem().string() + "_history.csv");
            std::ofstream hist(history_path, std::ios::binary);
            if (!hist)
                throw pessiq::IoError("cannot open for writing: " + history_path.string());
            pessiq::write_history_csv(records, hist);
        }
    });
}

pessiq_status pessiq_report(const char* csv_path, char** text) {
    return guarded([&] {
        require(csv_path, "csv_path");
        require(text, "text");
        const auto records = pessiq::read_results_csv(std::string(csv_path));
        const auto report = pessiq::format_scaling_report(pessiq::scaling_sweep(records));
        char* buf = new char[report.size() + 1];
        std::memcpy(buf, report.c_str(), report.size() + 1);
        *text = buf;
    });
}

void pessiq_string_free(char* text) {
    delete[] text;
}

} // extern "C"
