// Command-line front end. Talks to the core exclusively through the public
// C API in dpci.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpci.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitExperiment = 3;

int exit_code_for(int rc) {
    switch (rc) {
        case DPCI_OK:
            return kExitOk;
        case DPCI_ERR_CONFIG:
        case DPCI_ERR_INVALID_ARGUMENT:
            return kExitConfig;
        default:
            return kExitExperiment;
    }
}

struct CommonOpts {
    std::string config;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint32_t trials = 0;
    std::uint32_t horizon = 0;
    std::uint32_t workers = 0;
    bool workers_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "Config file path or built-in name")->required();
    cmd->add_option("--out", o.out_dir, "Output directory (default: out)");
    cmd->add_option("--seed", o.seed, "Base seed override")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--trials", o.trials, "Trial count override");
    cmd->add_option("--horizon", o.horizon, "Horizon (T) override");
    cmd->add_option("--workers", o.workers, "Worker thread count (0 = auto)")
        ->each([&](const std::string&) { o.workers_set = true; });
}

int load_config(const CommonOpts& o, dpci_config** cfg) {
    int rc = dpci_config_load(o.config.c_str(), cfg);
    if (rc != DPCI_OK) {
        std::fprintf(stderr, "error: %s\n", dpci_last_error());
        return rc;
    }
    if (o.seed_set) dpci_config_set_seed(*cfg, o.seed);
    if (o.trials) dpci_config_set_trials(*cfg, o.trials);
    if (o.horizon) dpci_config_set_horizon(*cfg, o.horizon);
    if (o.workers_set) dpci_config_set_workers(*cfg, o.workers);
    return DPCI_OK;
}

int finish(dpci_report* rep, const CommonOpts& o) {
    char* summary = nullptr;
    if (dpci_report_summary_json(rep, &summary) == DPCI_OK) {
        std::printf("%s\n", summary);
        dpci_string_free(summary);
    }
    const int rc = dpci_report_write(rep, o.out_dir.c_str());
    if (rc != DPCI_OK) std::fprintf(stderr, "error: %s\n", dpci_last_error());
    dpci_report_free(rep);
    return rc;
}

int run_command(const CommonOpts& o, int (*runner)(const dpci_config*, dpci_report**)) {
    dpci_config* cfg = nullptr;
    int rc = load_config(o, &cfg);
    if (rc != DPCI_OK) return exit_code_for(rc);
    dpci_report* rep = nullptr;
    rc = runner(cfg, &rep);
    dpci_config_free(cfg);
    if (rc != DPCI_OK) {
        std::fprintf(stderr, "error: %s\n", dpci_last_error());
        return exit_code_for(rc);
    }
    rc = finish(rep, o);
    return exit_code_for(rc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dpci: confidence intervals for demand prediction in contextual "
                 "dynamic pricing"};
    app.require_subcommand(1);

    CommonOpts sim_o, cov_o, err_o, diag_o;
    CLI::App* sim = app.add_subcommand("simulate", "Run one pricing episode, emit CSV");
    add_common(sim, sim_o);
    CLI::App* cov = app.add_subcommand("coverage", "Replicated coverage experiment");
    add_common(cov, cov_o);
    CLI::App* err = app.add_subcommand("errors", "Normalized-error distributions");
    add_common(err, err_o);
    CLI::App* diag = app.add_subcommand("diagnose", "Whitening diagnostics across horizons");
    add_common(diag, diag_o);
    std::vector<std::uint32_t> horizons;
    std::uint32_t diag_trials = 100;
    diag->add_option("--horizons", horizons, "Horizons to diagnose (default 500 2000 8000)")
        ->delimiter(',');
    diag->add_option("--diag-trials", diag_trials, "Trials per horizon (default 100)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (sim->parsed()) return run_command(sim_o, dpci_run_simulate);
    if (cov->parsed()) return run_command(cov_o, dpci_run_coverage);
    if (err->parsed()) return run_command(err_o, dpci_run_errors);
    if (diag->parsed()) {
        dpci_config* cfg = nullptr;
        int rc = load_config(diag_o, &cfg);
        if (rc != DPCI_OK) return exit_code_for(rc);
        dpci_report* rep = nullptr;
        rc = dpci_run_diagnose(cfg, horizons.empty() ? nullptr : horizons.data(),
                               horizons.size(), diag_trials, &rep);
        dpci_config_free(cfg);
        if (rc != DPCI_OK) {
            std::fprintf(stderr, "error: %s\n", dpci_last_error());
            return exit_code_for(rc);
        }
        return exit_code_for(finish(rep, diag_o));
    }
    return kExitConfig;
}
