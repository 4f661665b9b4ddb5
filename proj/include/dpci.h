/*
 * dpci — confidence intervals for demand functions learned from adaptively
 * collected contextual pricing data.
 *
 * C API over the core library: opaque handles, integer error codes, and
 * string results owned by the library (release with dpci_string_free).
 * All functions return DPCI_OK on success; on failure the thread-local
 * message from dpci_last_error() describes what went wrong.
 */
#ifndef DPCI_H
#define DPCI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DPCI_API __declspec(dllexport)
#else
#define DPCI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    DPCI_OK = 0,
    DPCI_ERR_INVALID_ARGUMENT = 1, /* bad handle, null pointer, domain error */
    DPCI_ERR_CONFIG = 2,           /* unreadable or invalid configuration */
    DPCI_ERR_NUMERIC = 3,          /* factorization / rank / convergence failure */
    DPCI_ERR_EXPERIMENT = 4,       /* too many failed trials */
    DPCI_ERR_IO = 5                /* file read/write failure */
};

typedef struct dpci_config dpci_config;     /* experiment configuration */
typedef struct dpci_history dpci_history;   /* one episode of (p, x, d) data */
typedef struct dpci_analysis dpci_analysis; /* pilot + whitening + debias bundle */
typedef struct dpci_report dpci_report;     /* named text artifacts + summary */

DPCI_API const char* dpci_version(void);
/* Message for the most recent failing call on this thread ("" if none). */
DPCI_API const char* dpci_last_error(void);
DPCI_API void dpci_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

/* Built-in names: desk_logistic, desk_logistic_ucb, desk_linear,
 * paper_logistic. */
DPCI_API int dpci_config_builtin(const char* name, dpci_config** out);
DPCI_API int dpci_config_load(const char* path, dpci_config** out);
DPCI_API int dpci_config_from_json(const char* json_text, dpci_config** out);
DPCI_API int dpci_config_to_json(const dpci_config* cfg, char** out_json);
DPCI_API int dpci_config_set_seed(dpci_config* cfg, uint64_t seed);
DPCI_API int dpci_config_set_trials(dpci_config* cfg, uint32_t n_trials);
DPCI_API int dpci_config_set_horizon(dpci_config* cfg, uint32_t horizon);
DPCI_API int dpci_config_set_workers(dpci_config* cfg, uint32_t workers);
DPCI_API void dpci_config_free(dpci_config* cfg);

/* ---- experiments (replicated simulation harness) ----------------------- */

DPCI_API int dpci_run_simulate(const dpci_config* cfg, dpci_report** out);
DPCI_API int dpci_run_coverage(const dpci_config* cfg, dpci_report** out);
DPCI_API int dpci_run_errors(const dpci_config* cfg, dpci_report** out);
DPCI_API int dpci_run_diagnose(const dpci_config* cfg, const uint32_t* horizons,
                               size_t n_horizons, uint32_t trials_per_horizon,
                               dpci_report** out);

DPCI_API int dpci_report_summary_json(const dpci_report* rep, char** out_json);
DPCI_API int dpci_report_artifact_count(const dpci_report* rep, size_t* out_count);
DPCI_API int dpci_report_artifact_name(const dpci_report* rep, size_t index,
                                       char** out_name);
DPCI_API int dpci_report_artifact_data(const dpci_report* rep, size_t index,
                                       char** out_data);
/* Writes every artifact into out_dir (created if missing). */
DPCI_API int dpci_report_write(const dpci_report* rep, const char* out_dir);
DPCI_API void dpci_report_free(dpci_report* rep);

/* ---- inference on observed data ---------------------------------------- */

/* CSV columns t,p,x1..xk,d; lines starting with '#' are ignored. */
DPCI_API int dpci_history_from_csv_file(const char* path, dpci_history** out);
DPCI_API int dpci_history_from_arrays(const double* prices, const double* demands,
                                      const double* contexts_row_major, uint32_t horizon,
                                      uint32_t context_dim, dpci_history** out);
DPCI_API void dpci_history_free(dpci_history* h);

/* Pilot sequence + whitening (eta = T^-upsilon from the config) + debiased
 * estimate for the configured model. */
DPCI_API int dpci_analyze(const dpci_config* cfg, const dpci_history* h,
                          dpci_analysis** out);
/* which: 0 = pilot estimate, 1 = debiased estimate. `dim` must match the
 * model dimension. */
DPCI_API int dpci_analysis_theta(const dpci_analysis* a, int which, double* out,
                                 size_t dim);
/* method: 0 = debiased, 1 = Wald. x points at context_dim doubles. */
DPCI_API int dpci_analysis_pointwise(const dpci_analysis* a, double price, const double* x,
                                     size_t context_dim, double alpha, int method,
                                     double* out_lower, double* out_upper);
/* Constant half-width of the Monte-Carlo uniform band at level 1-alpha. */
DPCI_API int dpci_analysis_uniform_halfwidth(const dpci_analysis* a, double alpha,
                                             uint32_t mc_samples, uint64_t seed,
                                             double* out_halfwidth);
DPCI_API int dpci_analysis_diagnostics_json(const dpci_analysis* a, char** out_json);
/* Whitening matrix columns as CSV (t, w1..wd, norm). */
DPCI_API int dpci_analysis_whitening_csv(const dpci_analysis* a, char** out_csv);
DPCI_API void dpci_analysis_free(dpci_analysis* a);

#ifdef __cplusplus
}
#endif

#endif /* DPCI_H */
