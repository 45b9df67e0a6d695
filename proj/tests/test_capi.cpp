#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "pessiq/pessiq.h"

namespace {

void write_file(const char* path, const std::string& text) {
    std::ofstream(path) << text;
}

} // namespace

TEST_CASE("version and defaults") {
    CHECK(std::strlen(pessiq_version()) > 0);
    pessiq_train_config c{0.0, 0.0};
    pessiq_train_config_default(&c);
    CHECK(c.c_b == 1.0);
    CHECK(c.delta == 0.1);
}

TEST_CASE("end-to-end through the C interface") {
    pessiq_mdp* mdp = nullptr;
    REQUIRE(pessiq_mdp_chain(3, 2, 0.0, &mdp) == PESSIQ_OK);
    int S = 0, A = 0, H = 0;
    REQUIRE(pessiq_mdp_dims(mdp, &S, &A, &H) == PESSIQ_OK);
    CHECK(S == 3);
    CHECK(A == 2);
    CHECK(H == 2);
    double v_star = 0.0;
    REQUIRE(pessiq_mdp_optimal_value(mdp, &v_star) == PESSIQ_OK);
    CHECK(v_star == 1.0);

    REQUIRE(pessiq_mdp_write(mdp, "capi_mdp.json") == PESSIQ_OK);
    pessiq_mdp* back = nullptr;
    REQUIRE(pessiq_mdp_read("capi_mdp.json", &back) == PESSIQ_OK);
    double v_back = 0.0;
    pessiq_mdp_optimal_value(back, &v_back);
    CHECK(v_back == v_star);
    pessiq_mdp_free(back);

    pessiq_policy* mu = nullptr;
    REQUIRE(pessiq_policy_behavior(mdp, "mix:0.5", &mu) == PESSIQ_OK);
    int deterministic = -1;
    REQUIRE(pessiq_policy_info(mu, &H, &S, &A, &deterministic) == PESSIQ_OK);
    CHECK(deterministic == 0);
    int action = 0;
    CHECK(pessiq_policy_action(mu, 0, 0, &action) == PESSIQ_ERR_VALIDATION);
    double c_star = 0.0;
    REQUIRE(pessiq_concentrability(mdp, mu, &c_star) == PESSIQ_OK);
    CHECK(c_star == doctest::Approx(1.0 / 0.5625).epsilon(1e-12));

    pessiq_dataset* ds = nullptr;
    REQUIRE(pessiq_dataset_generate(mdp, mu, "mix:0.5", 20000, 3, &ds) == PESSIQ_OK);
    REQUIRE(pessiq_dataset_write(ds, "capi_data.jsonl") == PESSIQ_OK);
    pessiq_dataset* ds2 = nullptr;
    REQUIRE(pessiq_dataset_read("capi_data.jsonl", &ds2) == PESSIQ_OK);
    std::uint64_t K = 0;
    REQUIRE(pessiq_dataset_dims(ds2, &S, &A, &H, &K) == PESSIQ_OK);
    CHECK(K == 20000);

    for (const char* algo : {"lcb_q", "lcb_q_advantage", "vi_lcb"}) {
        INFO(algo);
        pessiq_policy* pi = nullptr;
        REQUIRE(pessiq_train(ds2, algo, nullptr, &pi) == PESSIQ_OK);
        REQUIRE(pessiq_policy_info(pi, &H, &S, &A, &deterministic) == PESSIQ_OK);
        CHECK(deterministic == 1);
        double gap = -1.0;
        REQUIRE(pessiq_suboptimality(mdp, pi, &gap) == PESSIQ_OK);
        CHECK(gap <= 0.05);
        REQUIRE(pessiq_policy_write(pi, "capi_policy.json") == PESSIQ_OK);
        pessiq_policy* pi2 = nullptr;
        REQUIRE(pessiq_policy_read("capi_policy.json", &pi2) == PESSIQ_OK);
        double gap2 = -1.0;
        REQUIRE(pessiq_suboptimality(mdp, pi2, &gap2) == PESSIQ_OK);
        CHECK(gap2 == gap);
        pessiq_policy_free(pi2);
        pessiq_policy_free(pi);
    }

    pessiq_train_config bad{0.0, 0.1};
    pessiq_policy* never = nullptr;
    CHECK(pessiq_train(ds2, "lcb_q", &bad, &never) == PESSIQ_ERR_VALIDATION);
    CHECK(never == nullptr);
    CHECK(std::strlen(pessiq_last_error()) > 0);
    CHECK(pessiq_train(ds2, "ucb_q", nullptr, &never) == PESSIQ_ERR_VALIDATION);

    pessiq_dataset_free(ds2);
    pessiq_dataset_free(ds);
    pessiq_policy_free(mu);
    pessiq_mdp_free(mdp);
}

TEST_CASE("error codes") {
    pessiq_mdp* mdp = nullptr;
    CHECK(pessiq_mdp_chain(1, 2, 0.0, &mdp) == PESSIQ_ERR_VALIDATION);
    CHECK(mdp == nullptr);
    CHECK(pessiq_mdp_read("no_such_file.json", &mdp) == PESSIQ_ERR_IO);
    CHECK(std::string(pessiq_last_error()).find("no_such_file.json") != std::string::npos);
    write_file("capi_bad_mdp.json", "{\"schema\":\"tabular-mdp-v2\"}");
    CHECK(pessiq_mdp_read("capi_bad_mdp.json", &mdp) == PESSIQ_ERR_VALIDATION);
    CHECK(pessiq_mdp_dims(nullptr, nullptr, nullptr, nullptr) == PESSIQ_ERR_VALIDATION);

    pessiq_dataset* ds = nullptr;
    write_file("capi_bad_data.jsonl", "{\"schema\":\"offline-rl-v0\"}\n");
    CHECK(pessiq_dataset_read("capi_bad_data.jsonl", &ds) == PESSIQ_ERR_VALIDATION);
    CHECK(pessiq_dataset_read("missing.jsonl", &ds) == PESSIQ_ERR_IO);

    REQUIRE(pessiq_mdp_random(3, 2, 2, 1.0, 5, &mdp) == PESSIQ_OK);
    pessiq_policy* pi = nullptr;
    CHECK(pessiq_policy_behavior(mdp, "mix:2", &pi) == PESSIQ_ERR_VALIDATION);
    CHECK(pessiq_policy_behavior(mdp, "missing_policy.json", &pi) == PESSIQ_ERR_IO);
    REQUIRE(pessiq_policy_behavior(mdp, "optimal", &pi) == PESSIQ_OK);
    int action = -1;
    CHECK(pessiq_policy_action(pi, 5, 0, &action) == PESSIQ_ERR_VALIDATION);
    REQUIRE(pessiq_policy_action(pi, 1, 2, &action) == PESSIQ_OK);
    CHECK((action == 0 || action == 1));
    CHECK(pessiq_dataset_generate(mdp, pi, "optimal", 0, 1, &ds) == PESSIQ_ERR_VALIDATION);
    CHECK(pessiq_mdp_write(mdp, "/nonexistent_dir/mdp.json") == PESSIQ_ERR_IO);
    pessiq_policy_free(pi);
    pessiq_mdp_free(mdp);

    // Release functions accept NULL.
    pessiq_mdp_free(nullptr);
    pessiq_policy_free(nullptr);
    pessiq_dataset_free(nullptr);
    pessiq_string_free(nullptr);
}

TEST_CASE("sweep and report") {
    write_file("capi_sweep.json", R"({"S":3,"H":2,"slip":0.1,"K":[16,32,64,128],"seeds":[0,1,2,3,4,5,6,7,8,9],
        "algorithms":["lcb_q","vi_lcb"],"record_history":true,"eval_stride":8,"c_b":0.05})");
    REQUIRE(pessiq_sweep("capi_sweep.json", 4, "capi_results.csv") == PESSIQ_OK);
    std::ifstream in("capi_results.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "algorithm,K,T,seed,c_b,delta,c_star,suboptimality,wall_time_ms,pessimism_violation");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);)
        rows += !line.empty();
    CHECK(rows == 80);
    CHECK(std::ifstream("capi_results_history.csv").good());

    char* text = nullptr;
    REQUIRE(pessiq_report("capi_results.csv", &text) == PESSIQ_OK);
    REQUIRE(text != nullptr);
    CHECK(std::string(text).find("slope=") != std::string::npos);
    pessiq_string_free(text);

    CHECK(pessiq_sweep("missing_sweep.json", 1, nullptr) == PESSIQ_ERR_IO);
    write_file("capi_bad_sweep.json", R"({"K":[16],"bogus":1})");
    CHECK(pessiq_sweep("capi_bad_sweep.json", 1, nullptr) == PESSIQ_ERR_VALIDATION);
    CHECK(pessiq_report("missing.csv", &text) == PESSIQ_ERR_IO);
}
