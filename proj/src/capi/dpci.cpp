#include "dpci.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "harness.hpp"

using namespace dpci;

struct dpci_config {
    ExperimentConfig cfg;
};

struct dpci_history {
    History h;
};

struct dpci_analysis {
    ExperimentConfig cfg;
    History h;
    PilotSequence pilots;
    WhiteningMatrix whitening;
    DebiasedEstimate estimate;
    WaldFit wald;
    WhiteningDiagnostics diag;
};

struct dpci_report {
    std::string summary_json;
    std::vector<std::pair<std::string, std::string>> artifacts;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return DPCI_OK;
    } catch (const ConfigError& e) {
        return fail(DPCI_ERR_CONFIG, e.what());
    } catch (const ExperimentError& e) {
        return fail(DPCI_ERR_EXPERIMENT, e.what());
    } catch (const NumericError& e) {
        return fail(DPCI_ERR_NUMERIC, e.what());
    } catch (const IoError& e) {
        return fail(DPCI_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(DPCI_ERR_INVALID_ARGUMENT, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* dpci_version(void) { return "1.0.0"; }

const char* dpci_last_error(void) { return g_last_error.c_str(); }

void dpci_string_free(char* s) { delete[] s; }

int dpci_config_builtin(const char* name, dpci_config** out) {
    if (!name || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new dpci_config{builtin_config(name)}; });
}

int dpci_config_load(const char* path, dpci_config** out) {
    if (!path || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new dpci_config{load_config(path)}; });
}

int dpci_config_from_json(const char* json_text, dpci_config** out) {
    if (!json_text || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new dpci_config{experiment_config_from_json(json_text)}; });
}

int dpci_config_to_json(const dpci_config* cfg, char** out_json) {
    if (!cfg || !out_json) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out_json = dup_string(experiment_config_to_json(cfg->cfg)); });
}

int dpci_config_set_seed(dpci_config* cfg, uint64_t seed) {
    if (!cfg) return fail(DPCI_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.base_seed = seed;
    return DPCI_OK;
}

int dpci_config_set_trials(dpci_config* cfg, uint32_t n_trials) {
    if (!cfg) return fail(DPCI_ERR_INVALID_ARGUMENT, "null config");
    if (n_trials < 1) return fail(DPCI_ERR_CONFIG, "n_trials must be >= 1");
    cfg->cfg.n_trials = n_trials;
    return DPCI_OK;
}

int dpci_config_set_horizon(dpci_config* cfg, uint32_t horizon) {
    if (!cfg) return fail(DPCI_ERR_INVALID_ARGUMENT, "null config");
    if (horizon < 1) return fail(DPCI_ERR_CONFIG, "horizon must be >= 1");
    cfg->cfg.horizon = horizon;
    return DPCI_OK;
}

int dpci_config_set_workers(dpci_config* cfg, uint32_t workers) {
    if (!cfg) return fail(DPCI_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.workers = workers;
    return DPCI_OK;
}

void dpci_config_free(dpci_config* cfg) { delete cfg; }

int dpci_run_simulate(const dpci_config* cfg, dpci_report** out) {
    if (!cfg || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        SimulateReport rep = simulate_experiment(cfg->cfg);
        auto* r = new dpci_report;
        r->summary_json = "{\"kind\":\"simulate\",\"horizon\":" +
                          std::to_string(cfg->cfg.horizon) + "}";
        r->artifacts = rep.files();
        *out = r;
    });
}

int dpci_run_coverage(const dpci_config* cfg, dpci_report** out) {
    if (!cfg || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        CoverageReport rep = coverage_experiment(cfg->cfg);
        auto* r = new dpci_report;
        r->summary_json = rep.to_json();
        r->artifacts = rep.files();
        *out = r;
    });
}

int dpci_run_errors(const dpci_config* cfg, dpci_report** out) {
    if (!cfg || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        ErrorDistributionReport rep = error_distribution_experiment(cfg->cfg);
        auto* r = new dpci_report;
        r->summary_json = rep.summary_json();
        r->artifacts = rep.files();
        *out = r;
    });
}

int dpci_run_diagnose(const dpci_config* cfg, const uint32_t* horizons, size_t n_horizons,
                      uint32_t trials_per_horizon, dpci_report** out) {
    if (!cfg || !out || (!horizons && n_horizons > 0))
        return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::vector<std::size_t> hs;
        if (n_horizons == 0) {
            hs = {500, 2000, 8000};
        } else {
            for (size_t i = 0; i < n_horizons; ++i) hs.push_back(horizons[i]);
        }
        DiagnoseReport rep =
            diagnose_experiment(cfg->cfg, hs, trials_per_horizon ? trials_per_horizon : 100);
        auto* r = new dpci_report;
        r->summary_json = rep.to_json();
        r->artifacts = rep.files();
        *out = r;
    });
}

int dpci_report_summary_json(const dpci_report* rep, char** out_json) {
    if (!rep || !out_json) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    *out_json = dup_string(rep->summary_json);
    return DPCI_OK;
}

int dpci_report_artifact_count(const dpci_report* rep, size_t* out_count) {
    if (!rep || !out_count) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    *out_count = rep->artifacts.size();
    return DPCI_OK;
}

int dpci_report_artifact_name(const dpci_report* rep, size_t index, char** out_name) {
    if (!rep || !out_name) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= rep->artifacts.size())
        return fail(DPCI_ERR_INVALID_ARGUMENT, "artifact index out of range");
    *out_name = dup_string(rep->artifacts[index].first);
    return DPCI_OK;
}

int dpci_report_artifact_data(const dpci_report* rep, size_t index, char** out_data) {
    if (!rep || !out_data) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= rep->artifacts.size())
        return fail(DPCI_ERR_INVALID_ARGUMENT, "artifact index out of range");
    *out_data = dup_string(rep->artifacts[index].second);
    return DPCI_OK;
}

int dpci_report_write(const dpci_report* rep, const char* out_dir) {
    if (!rep || !out_dir) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + std::string(out_dir) + "'");
        for (const auto& [name, data] : rep->artifacts) {
            std::ofstream f(dir / name, std::ios::binary);
            if (!f) throw IoError("cannot open '" + (dir / name).string() + "' for writing");
            f.write(data.data(), static_cast<std::streamsize>(data.size()));
            if (!f) throw IoError("short write to '" + (dir / name).string() + "'");
        }
    });
}

void dpci_report_free(dpci_report* rep) { delete rep; }

int dpci_history_from_csv_file(const char* path, dpci_history** out) {
    if (!path || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open history file '" + std::string(path) + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        *out = new dpci_history{history_from_csv(ss.str())};
    });
}

int dpci_history_from_arrays(const double* prices, const double* demands,
                             const double* contexts_row_major, uint32_t horizon,
                             uint32_t context_dim, dpci_history** out) {
    if (!prices || !demands || !contexts_row_major || !out || horizon == 0 || context_dim == 0)
        return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument or empty history");
    History h;
    h.prices.assign(prices, prices + horizon);
    h.demands.assign(demands, demands + horizon);
    h.contexts.reserve(horizon);
    for (uint32_t t = 0; t < horizon; ++t)
        h.contexts.emplace_back(contexts_row_major + static_cast<size_t>(t) * context_dim,
                                contexts_row_major + static_cast<size_t>(t + 1) * context_dim);
    *out = new dpci_history{std::move(h)};
    return DPCI_OK;
}

void dpci_history_free(dpci_history* h) { delete h; }

int dpci_analyze(const dpci_config* cfg, const dpci_history* h, dpci_analysis** out) {
    if (!cfg || !h || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto a = std::make_unique<dpci_analysis>();
        a->cfg = cfg->cfg;
        a->cfg.horizon = h->h.size();
        a->h = h->h;
        a->h.validate(a->cfg.model);
        a->pilots = pilot_sequence(a->h, a->cfg.model, a->cfg.pilot_ridge);
        a->whitening = whiten(a->h, a->pilots, a->cfg.model, a->cfg.eta());
        a->estimate = debias(a->pilots.final_estimate(), a->whitening, a->h, a->cfg.model);
        a->wald = wald_fit(a->h, a->cfg.model);
        a->diag =
            whitening_diagnostics(a->whitening, a->h, a->pilots.final_estimate(), a->cfg.model);
        *out = a.release();
    });
}

int dpci_analysis_theta(const dpci_analysis* a, int which, double* out, size_t dim) {
    if (!a || !out) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    const Vec& v = which == 1 ? a->estimate.theta_d : a->estimate.theta_p;
    if (dim != v.size()) return fail(DPCI_ERR_INVALID_ARGUMENT, "dimension mismatch");
    std::memcpy(out, v.data(), dim * sizeof(double));
    return DPCI_OK;
}

int dpci_analysis_pointwise(const dpci_analysis* a, double price, const double* x,
                            size_t context_dim, double alpha, int method, double* out_lower,
                            double* out_upper) {
    if (!a || !x || !out_lower || !out_upper)
        return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const Vec ctx(x, x + context_dim);
        ConfidenceBand band =
            method == 1 ? wald_ci(a->wald, price, ctx, alpha, a->cfg.model)
                        : pointwise_ci(a->estimate, price, ctx, alpha, a->cfg.model);
        *out_lower = band.lower;
        *out_upper = band.upper;
    });
}

int dpci_analysis_uniform_halfwidth(const dpci_analysis* a, double alpha, uint32_t mc_samples,
                                    uint64_t seed, double* out_halfwidth) {
    if (!a || !out_halfwidth) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const UniformGrid grid = make_uniform_grid(
            a->cfg.model, a->cfg.grid.price_points, a->cfg.grid.context_points,
            a->cfg.grid.context_lo, a->cfg.grid.context_hi);
        Rng rng(seed);
        ConfidenceBand band = uniform_ci(a->estimate, alpha,
                                         mc_samples ? mc_samples : a->cfg.mc_samples, grid,
                                         a->cfg.model, rng);
        *out_halfwidth = band.half_width;
    });
}

int dpci_analysis_diagnostics_json(const dpci_analysis* a, char** out_json) {
    if (!a || !out_json) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out_json = dup_string(whitening_diagnostics_to_json(a->diag)); });
}

int dpci_analysis_whitening_csv(const dpci_analysis* a, char** out_csv) {
    if (!a || !out_csv) return fail(DPCI_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out_csv = dup_string(whitening_to_csv(a->whitening)); });
}

void dpci_analysis_free(dpci_analysis* a) { delete a; }

}  // extern "C"
