#pragma once

#include "config.hpp"
#include "inference.hpp"
#include "stats.hpp"

namespace dpci {

// Everything measured in one replicated trial: episode -> pilot -> whitening
// -> debias -> confidence intervals -> coverage indicators and standardized
// errors for both methods.
struct MethodTrialData {
    std::vector<std::vector<char>> point_cover;   // [query][alpha]
    std::vector<std::vector<double>> point_width; // [query][alpha] half-widths
    std::vector<char> uniform_cover;              // [alpha]
    std::vector<double> uniform_halfwidth;        // [alpha]
    Vec est_errors;                               // standardized, length d
    Vec pred_errors;                              // one per query
};

struct TrialRecord {
    bool failed = false;            // pipeline failure: episode/pilot/whitening/debias
    std::string fail_reason;
    bool wald_failed = false;       // Wald machinery unavailable (singular information)
    std::string wald_fail_reason;
    MethodTrialData debiased;
    MethodTrialData wald;
    WhiteningDiagnostics wdiag;
    std::size_t pilot_fallbacks = 0;
    std::size_t pilot_nonconverged = 0;
    std::size_t episode_fallbacks = 0;
    // s_alpha >= z * sigma at every query and alpha, within 3% Monte-Carlo slack
    bool uniform_contains_pointwise = true;
};

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

// Runs n_trials trials on a bounded worker pool; results are keyed by trial
// index so the outcome does not depend on scheduling.
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg);

struct CoverageCell {
    std::string method;  // "debiased" | "wald"
    std::string query;   // "p=..,x=.." | "uniform"
    double alpha = 0.0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double rate = 0.0;
    double halfwidth95 = 0.0;  // binomial sampling half-width of the rate
    double mean_width = 0.0;
};

struct CoverageReport {
    std::string config_json;  // without the workers field
    std::string csv_header;   // deterministic metadata comment block
    std::vector<CoverageCell> cells;
    std::size_t n_trials = 0;
    std::size_t failures = 0;
    double iwg_opnorm_median = 0.0;
    double cube_sum_median = 0.0;
    double lambda_min_median = 0.0;
    double clip_fraction_mean = 0.0;
    std::size_t pilot_fallback_total = 0;
    std::size_t episode_fallback_total = 0;
    double uniform_contains_pointwise_rate = 0.0;

    const CoverageCell* find(const std::string& method, const std::string& query,
                             double alpha) const;
    std::string to_json() const;
    std::string to_csv() const;
    std::vector<std::pair<std::string, std::string>> files() const;
};

CoverageReport coverage_experiment(const ExperimentConfig& cfg);
CoverageReport aggregate_coverage(const ExperimentConfig& cfg,
                                  const std::vector<TrialRecord>& records);

struct ErrorSeries {
    std::string name;
    Vec values;  // ordered by trial index, failed trials skipped
};

struct ErrorDistributionReport {
    std::string config_json;
    std::string csv_header;
    std::vector<ErrorSeries> series;
    std::size_t n_trials = 0;
    std::size_t failures = 0;

    const ErrorSeries* find(const std::string& name) const;
    std::string to_csv() const;
    std::string summary_json() const;
    std::string histogram_csv() const;  // fixed bins over [-6, 6], width 0.25
    std::vector<std::pair<std::string, std::string>> files() const;
};

ErrorDistributionReport error_distribution_experiment(const ExperimentConfig& cfg);
ErrorDistributionReport aggregate_errors(const ExperimentConfig& cfg,
                                         const std::vector<TrialRecord>& records);

struct DiagnoseRow {
    std::size_t horizon = 0;
    double eta = 0.0;
    double iwg_median = 0.0;
    double iwg_over_eta_sqrt_t = 0.0;
    double cube_sum_median = 0.0;
    double lambda_min_median = 0.0;
    double clip_fraction_mean = 0.0;
    double pilot_err_median = 0.0;  // ||theta_p - theta0|| at the final pilot
    std::size_t trials = 0;
};

struct DiagnoseReport {
    std::string config_json;
    std::string csv_header;
    std::vector<DiagnoseRow> rows;
    std::string to_json() const;
    std::string to_csv() const;
    std::vector<std::pair<std::string, std::string>> files() const;
};

// Whitening/pilot diagnostics across horizons (eta = T^-upsilon per horizon).
DiagnoseReport diagnose_experiment(const ExperimentConfig& base,
                                   const std::vector<std::size_t>& horizons,
                                   std::size_t n_trials);

struct SimulateReport {
    std::string config_json;
    std::string episode_csv;
    std::vector<std::pair<std::string, std::string>> files() const;
};

SimulateReport simulate_experiment(const ExperimentConfig& cfg);

// Deterministic metadata comment block for CSV outputs.
std::string csv_metadata_header(const ExperimentConfig& cfg);

}  // namespace dpci
