#ifndef PESSIQ_PESSIQ_H
#define PESSIQ_PESSIQ_H

/*
 * C interface to the pessimistic offline Q-learning toolkit.
 *
 * Objects are opaque handles created by the functions below and released
 * with the matching *_free call. Every fallible call returns a pessiq_status;
 * on failure pessiq_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). Output handles are only written
 * on success.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(PESSIQ_BUILDING_LIBRARY)
#  define PESSIQ_API __attribute__((visibility("default")))
#else
#  define PESSIQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pessiq_status {
    PESSIQ_OK = 0,
    PESSIQ_ERR_INTERNAL = 1,
    PESSIQ_ERR_VALIDATION = 2,
    PESSIQ_ERR_IO = 3
} pessiq_status;

typedef struct pessiq_mdp pessiq_mdp;
typedef struct pessiq_policy pessiq_policy;
typedef struct pessiq_dataset pessiq_dataset;

typedef struct pessiq_train_config {
    double c_b;
    double delta;
} pessiq_train_config;

PESSIQ_API const char* pessiq_version(void);
PESSIQ_API const char* pessiq_last_error(void);
/* Fills c_b = 1.0, delta = 0.1. */
PESSIQ_API void pessiq_train_config_default(pessiq_train_config* config);

/* MDPs */
PESSIQ_API pessiq_status pessiq_mdp_chain(int S, int H, double slip, pessiq_mdp** out);
PESSIQ_API pessiq_status pessiq_mdp_random(int S, int A, int H, double sparsity, uint64_t seed, pessiq_mdp** out);
PESSIQ_API pessiq_status pessiq_mdp_read(const char* path, pessiq_mdp** out);
PESSIQ_API pessiq_status pessiq_mdp_write(const pessiq_mdp* mdp, const char* path);
PESSIQ_API pessiq_status pessiq_mdp_dims(const pessiq_mdp* mdp, int* S, int* A, int* H);
/* V*_0(rho). */
PESSIQ_API pessiq_status pessiq_mdp_optimal_value(const pessiq_mdp* mdp, double* out);
PESSIQ_API void pessiq_mdp_free(pessiq_mdp* mdp);

/* Policies */
/* descriptor: "mix:<lambda>", "uniform", "optimal" or a policy-v1 file path. */
PESSIQ_API pessiq_status pessiq_policy_behavior(const pessiq_mdp* mdp, const char* descriptor, pessiq_policy** out);
PESSIQ_API pessiq_status pessiq_policy_read(const char* path, pessiq_policy** out);
PESSIQ_API pessiq_status pessiq_policy_write(const pessiq_policy* policy, const char* path);
/* Sets *deterministic to 1 or 0. */
PESSIQ_API pessiq_status pessiq_policy_info(const pessiq_policy* policy, int* H, int* S, int* A, int* deterministic);
PESSIQ_API pessiq_status pessiq_policy_action(const pessiq_policy* policy, int h, int s, int* action);
PESSIQ_API void pessiq_policy_free(pessiq_policy* policy);

/* Datasets */
PESSIQ_API pessiq_status pessiq_dataset_generate(const pessiq_mdp* mdp, const pessiq_policy* behavior,
                                                 const char* behavior_id, uint64_t K, uint64_t seed,
                                                 pessiq_dataset** out);
PESSIQ_API pessiq_status pessiq_dataset_read(const char* path, pessiq_dataset** out);
PESSIQ_API pessiq_status pessiq_dataset_write(const pessiq_dataset* ds, const char* path);
PESSIQ_API pessiq_status pessiq_dataset_dims(const pessiq_dataset* ds, int* S, int* A, int* H, uint64_t* K);
PESSIQ_API void pessiq_dataset_free(pessiq_dataset* ds);

/* Learning and evaluation */
/* algorithm: "lcb_q", "lcb_q_advantage" or "vi_lcb". config may be NULL. */
PESSIQ_API pessiq_status pessiq_train(const pessiq_dataset* ds, const char* algorithm,
                                      const pessiq_train_config* config, pessiq_policy** out);
PESSIQ_API pessiq_status pessiq_suboptimality(const pessiq_mdp* mdp, const pessiq_policy* policy, double* out);
/* Single-policy concentrability of behavior w.r.t. the optimal policy; may be +inf. */
PESSIQ_API pessiq_status pessiq_concentrability(const pessiq_mdp* mdp, const pessiq_policy* behavior, double* out);

/* Experiments */
/* Runs a JSON-configured sweep and writes the results CSV. If out_csv is NULL
   the CSV goes to <out_dir>/results.csv from the config. */
PESSIQ_API pessiq_status pessiq_sweep(const char* config_path, unsigned jobs, const char* out_csv);
/* Slope report for a results CSV; *text must be released with pessiq_string_free. */
PESSIQ_API pessiq_status pessiq_report(const char* csv_path, char** text);
PESSIQ_API void pessiq_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif
