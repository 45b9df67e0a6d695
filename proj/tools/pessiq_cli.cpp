// Command-line front end. Talks to the library exclusively through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "pessiq/pessiq.h"

namespace {

// Exit codes: 0 ok, 2 validation, 3 I/O, 1 anything else.
int report_status(pessiq_status st) {
    if (st != PESSIQ_OK)
        std::fprintf(stderr, "pessiq: %s\n", pessiq_last_error());
    return static_cast<int>(st);
}

#define PESSIQ_TRY(expr)                        \
    do {                                        \
        const pessiq_status st_ = (expr);       \
        if (st_ != PESSIQ_OK) {                 \
            rc = report_status(st_);            \
            goto cleanup;                       \
        }                                       \
    } while (0)

struct GenMdpArgs {
    std::string family = "chain";
    int S = 5, A = 2, H = 4;
    double slip = 0.2, sparsity = 1.0;
    uint64_t seed = 0;
    std::string out;
};

struct GenDataArgs {
    std::string mdp, behavior = "mix:0.5", out;
    uint64_t K = 1024, seed = 0;
};

struct TrainArgs {
    std::string algo = "lcb_q_advantage", data, out;
    double c_b = 1.0, delta = 0.1;
};

struct EvalArgs {
    std::string mdp, policy, behavior;
};

struct SweepArgs {
    std::string config, out;
    unsigned jobs = 1;
};

int run_gen_mdp(const GenMdpArgs& a) {
    int rc = 0;
    pessiq_mdp* mdp = nullptr;
    if (a.family == "chain") {
        PESSIQ_TRY(pessiq_mdp_chain(a.S, a.H, a.slip, &mdp));
    } else if (a.family == "random") {
        PESSIQ_TRY(pessiq_mdp_random(a.S, a.A, a.H, a.sparsity, a.seed, &mdp));
    } else {
        std::fprintf(stderr, "pessiq: unknown family '%s' (chain or random)\n", a.family.c_str());
        return 2;
    }
    PESSIQ_TRY(pessiq_mdp_write(mdp, a.out.c_str()));
cleanup:
    pessiq_mdp_free(mdp);
    return rc;
}

int run_gen_data(const GenDataArgs& a) {
    int rc = 0;
    pessiq_mdp* mdp = nullptr;
    pessiq_policy* mu = nullptr;
    pessiq_dataset* ds = nullptr;
    PESSIQ_TRY(pessiq_mdp_read(a.mdp.c_str(), &mdp));
    PESSIQ_TRY(pessiq_policy_behavior(mdp, a.behavior.c_str(), &mu));
    PESSIQ_TRY(pessiq_dataset_generate(mdp, mu, a.behavior.c_str(), a.K, a.seed, &ds));
    PESSIQ_TRY(pessiq_dataset_write(ds, a.out.c_str()));
cleanup:
    pessiq_dataset_free(ds);
    pessiq_policy_free(mu);
    pessiq_mdp_free(mdp);
    return rc;
}

int run_train(const TrainArgs& a) {
    int rc = 0;
    pessiq_dataset* ds = nullptr;
    pessiq_policy* pi = nullptr;
    pessiq_train_config config{a.c_b, a.delta};
    PESSIQ_TRY(pessiq_dataset_read(a.data.c_str(), &ds));
    PESSIQ_TRY(pessiq_train(ds, a.algo.c_str(), &config, &pi));
    PESSIQ_TRY(pessiq_policy_write(pi, a.out.c_str()));
cleanup:
    pessiq_policy_free(pi);
    pessiq_dataset_free(ds);
    return rc;
}

int run_eval(const EvalArgs& a) {
    int rc = 0;
    pessiq_mdp* mdp = nullptr;
    pessiq_policy* pi = nullptr;
    pessiq_policy* mu = nullptr;
    double gap = 0.0, c_star = 0.0;
    PESSIQ_TRY(pessiq_mdp_read(a.mdp.c_str(), &mdp));
    PESSIQ_TRY(pessiq_policy_read(a.policy.c_str(), &pi));
    PESSIQ_TRY(pessiq_suboptimality(mdp, pi, &gap));
    std::printf("%.17g\n", gap);
    if (!a.behavior.empty()) {
        PESSIQ_TRY(pessiq_policy_behavior(mdp, a.behavior.c_str(), &mu));
        PESSIQ_TRY(pessiq_concentrability(mdp, mu, &c_star));
        std::printf("c_star %.17g\n", c_star);
    }
cleanup:
    pessiq_policy_free(mu);
    pessiq_policy_free(pi);
    pessiq_mdp_free(mdp);
    return rc;
}

int run_sweep(const SweepArgs& a) {
    return report_status(pessiq_sweep(a.config.c_str(), a.jobs, a.out.empty() ? nullptr : a.out.c_str()));
}

int run_report(const std::string& csv) {
    char* text = nullptr;
    const pessiq_status st = pessiq_report(csv.c_str(), &text);
    if (st != PESSIQ_OK)
        return report_status(st);
    std::fputs(text, stdout);
    pessiq_string_free(text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pessiq: pessimistic offline Q-learning laboratory"};
    app.set_version_flag("--version", pessiq_version());
    app.require_subcommand(1);

    GenMdpArgs gm;
    auto* gen_mdp = app.add_subcommand("gen-mdp", "Generate an MDP file");
    gen_mdp->set_help_flag("--help", "Print this help message and exit");  // frees -h for the horizon
    gen_mdp->add_option("--family", gm.family, "chain or random")->capture_default_str();
    gen_mdp->add_option("--s", gm.S, "Number of states")->capture_default_str();
    gen_mdp->add_option("--a", gm.A, "Number of actions (random family)")->capture_default_str();
    gen_mdp->add_option("--h", gm.H, "Horizon")->capture_default_str();
    gen_mdp->add_option("--slip", gm.slip, "Slip probability (chain family)")->capture_default_str();
    gen_mdp->add_option("--sparsity", gm.sparsity, "Support fraction (random family)")->capture_default_str();
    gen_mdp->add_option("--seed", gm.seed, "Seed (random family)")->capture_default_str();
    gen_mdp->add_option("--out", gm.out, "Output path")->required();

    GenDataArgs gd;
    auto* gen_data = app.add_subcommand("gen-data", "Log a batch dataset with a behavior policy");
    gen_data->add_option("--mdp", gd.mdp, "MDP file")->required();
    gen_data->add_option("--behavior", gd.behavior, "mix:<lambda>, uniform, optimal or a policy file")
        ->capture_default_str();
    gen_data->add_option("--k", gd.K, "Number of episodes")->capture_default_str();
    gen_data->add_option("--seed", gd.seed, "Dataset seed")->capture_default_str();
    gen_data->add_option("--out", gd.out, "Output path (JSON Lines)")->required();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Learn a policy from a dataset");
    train->add_option("--algo", tr.algo, "lcb_q, lcb_q_advantage or vi_lcb")->capture_default_str();
    train->add_option("--data", tr.data, "Dataset file")->required();
    train->add_option("--c-b", tr.c_b, "Bonus constant")->capture_default_str();
    train->add_option("--delta", tr.delta, "Failure probability")->capture_default_str();
    train->add_option("--out", tr.out, "Policy output path")->required();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Print the suboptimality of a policy");
    eval->add_option("--mdp", ev.mdp, "MDP file")->required();
    eval->add_option("--policy", ev.policy, "Policy file")->required();
    eval->add_option("--behavior", ev.behavior, "Also print C* of this behavior policy");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Run a configured experiment sweep");
    sweep->add_option("--config", sw.config, "Experiment config (JSON)")->required();
    sweep->add_option("--jobs", sw.jobs, "Concurrent runs")->capture_default_str();
    sweep->add_option("--out", sw.out, "Results CSV path (default <out_dir>/results.csv)");

    std::string results;
    auto* report = app.add_subcommand("report", "Fit scaling slopes from a results CSV");
    report->add_option("--results,results", results, "Results CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*gen_mdp) return run_gen_mdp(gm);
    if (*gen_data) return run_gen_data(gd);
    if (*train) return run_train(tr);
    if (*eval) return run_eval(ev);
    if (*sweep) return run_sweep(sw);
    return run_report(results);
}
