#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "dpci.h"

namespace {

struct StringOut {
    char* s = nullptr;
    ~StringOut() { dpci_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

}  // namespace

TEST_CASE("version and error strings") {
    CHECK(dpci_version() != nullptr);
    CHECK(std::string(dpci_version()).find('.') != std::string::npos);
}

TEST_CASE("config lifecycle and overrides") {
    dpci_config* cfg = nullptr;
    REQUIRE(dpci_config_builtin("desk_logistic", &cfg) == DPCI_OK);
    CHECK(dpci_config_set_seed(cfg, 99) == DPCI_OK);
    CHECK(dpci_config_set_trials(cfg, 2) == DPCI_OK);
    CHECK(dpci_config_set_horizon(cfg, 100) == DPCI_OK);
    CHECK(dpci_config_set_workers(cfg, 1) == DPCI_OK);
    StringOut json;
    REQUIRE(dpci_config_to_json(cfg, &json.s) == DPCI_OK);
    CHECK(json.str().find("\"horizon\": 100") != std::string::npos);
    CHECK(json.str().find("\"base_seed\": 99") != std::string::npos);
    dpci_config_free(cfg);

    dpci_config* bad = nullptr;
    CHECK(dpci_config_builtin("nonsense", &bad) == DPCI_ERR_CONFIG);
    CHECK(std::string(dpci_last_error()).find("nonsense") != std::string::npos);
    CHECK(dpci_config_load("/no/such/path.json", &bad) == DPCI_ERR_CONFIG);
    CHECK(dpci_config_from_json("{broken", &bad) == DPCI_ERR_CONFIG);
    CHECK(dpci_config_builtin(nullptr, &bad) == DPCI_ERR_INVALID_ARGUMENT);
}

TEST_CASE("coverage run produces a report with artifacts") {
    dpci_config* cfg = nullptr;
    REQUIRE(dpci_config_builtin("desk_logistic", &cfg) == DPCI_OK);
    dpci_config_set_trials(cfg, 2);
    dpci_config_set_horizon(cfg, 100);
    dpci_config_set_seed(cfg, 7);
    dpci_config_set_workers(cfg, 1);

    dpci_report* rep = nullptr;
    REQUIRE(dpci_run_coverage(cfg, &rep) == DPCI_OK);
    StringOut summary;
    REQUIRE(dpci_report_summary_json(rep, &summary.s) == DPCI_OK);
    CHECK(summary.str().find("\"kind\": \"coverage\"") != std::string::npos);

    size_t count = 0;
    REQUIRE(dpci_report_artifact_count(rep, &count) == DPCI_OK);
    REQUIRE(count == 2);
    bool saw_json = false, saw_csv = false;
    for (size_t i = 0; i < count; ++i) {
        StringOut name, data;
        REQUIRE(dpci_report_artifact_name(rep, i, &name.s) == DPCI_OK);
        REQUIRE(dpci_report_artifact_data(rep, i, &data.s) == DPCI_OK);
        if (name.str() == "coverage.json") saw_json = true;
        if (name.str() == "coverage.csv") saw_csv = !data.str().empty();
    }
    CHECK(saw_json);
    CHECK(saw_csv);

    StringOut bad;
    CHECK(dpci_report_artifact_name(rep, 99, &bad.s) == DPCI_ERR_INVALID_ARGUMENT);
    dpci_report_free(rep);
    dpci_config_free(cfg);
}

TEST_CASE("simulate, errors and diagnose run through the C surface") {
    dpci_config* cfg = nullptr;
    REQUIRE(dpci_config_builtin("desk_logistic", &cfg) == DPCI_OK);
    dpci_config_set_trials(cfg, 2);
    dpci_config_set_horizon(cfg, 80);
    dpci_config_set_workers(cfg, 1);

    dpci_report* sim = nullptr;
    REQUIRE(dpci_run_simulate(cfg, &sim) == DPCI_OK);
    size_t n = 0;
    dpci_report_artifact_count(sim, &n);
    CHECK(n == 1);
    dpci_report_free(sim);

    dpci_report* err = nullptr;
    REQUIRE(dpci_run_errors(cfg, &err) == DPCI_OK);
    StringOut summary;
    dpci_report_summary_json(err, &summary.s);
    CHECK(summary.str().find("eps_debiased_1") != std::string::npos);
    dpci_report_free(err);

    const uint32_t horizons[2] = {50, 80};
    dpci_report* diag = nullptr;
    REQUIRE(dpci_run_diagnose(cfg, horizons, 2, 3, &diag) == DPCI_OK);
    StringOut dsum;
    dpci_report_summary_json(diag, &dsum.s);
    CHECK(dsum.str().find("\"kind\": \"diagnose\"") != std::string::npos);
    dpci_report_free(diag);
    dpci_config_free(cfg);
}

TEST_CASE("report writing and filesystem round trip") {
    dpci_config* cfg = nullptr;
    REQUIRE(dpci_config_builtin("desk_logistic", &cfg) == DPCI_OK);
    dpci_config_set_trials(cfg, 1);
    dpci_config_set_horizon(cfg, 60);
    dpci_config_set_workers(cfg, 1);
    dpci_report* rep = nullptr;
    REQUIRE(dpci_run_simulate(cfg, &rep) == DPCI_OK);
    REQUIRE(dpci_report_write(rep, "capi_test_out") == DPCI_OK);

    dpci_history* h = nullptr;
    REQUIRE(dpci_history_from_csv_file("capi_test_out/episode.csv", &h) == DPCI_OK);
    dpci_history_free(h);
    CHECK(dpci_history_from_csv_file("/missing.csv", &h) == DPCI_ERR_IO);
    dpci_report_free(rep);
    dpci_config_free(cfg);
}

TEST_CASE("analysis over observed data") {
    dpci_config* cfg = nullptr;
    REQUIRE(dpci_config_builtin("desk_logistic", &cfg) == DPCI_OK);
    dpci_config_set_horizon(cfg, 400);
    dpci_config_set_workers(cfg, 1);

    // simulate an episode, reload it through the array interface
    dpci_report* sim = nullptr;
    REQUIRE(dpci_run_simulate(cfg, &sim) == DPCI_OK);
    REQUIRE(dpci_report_write(sim, "capi_test_out") == DPCI_OK);
    dpci_report_free(sim);
    dpci_history* h = nullptr;
    REQUIRE(dpci_history_from_csv_file("capi_test_out/episode.csv", &h) == DPCI_OK);

    dpci_analysis* a = nullptr;
    REQUIRE(dpci_analyze(cfg, h, &a) == DPCI_OK);

    double theta_p[2], theta_d[2];
    REQUIRE(dpci_analysis_theta(a, 0, theta_p, 2) == DPCI_OK);
    REQUIRE(dpci_analysis_theta(a, 1, theta_d, 2) == DPCI_OK);
    CHECK(dpci_analysis_theta(a, 0, theta_p, 3) == DPCI_ERR_INVALID_ARGUMENT);

    const double x = 0.0;
    double lo = 0.0, hi = 0.0;
    REQUIRE(dpci_analysis_pointwise(a, 0.5, &x, 1, 0.1, 0, &lo, &hi) == DPCI_OK);
    CHECK(lo < hi);
    double wlo = 0.0, whi = 0.0;
    REQUIRE(dpci_analysis_pointwise(a, 0.5, &x, 1, 0.1, 1, &wlo, &whi) == DPCI_OK);
    CHECK(wlo < whi);
    CHECK(dpci_analysis_pointwise(a, 0.5, &x, 1, 1.5, 0, &lo, &hi) ==
          DPCI_ERR_INVALID_ARGUMENT);

    double s_alpha = 0.0;
    REQUIRE(dpci_analysis_uniform_halfwidth(a, 0.1, 500, 42, &s_alpha) == DPCI_OK);
    CHECK(s_alpha > 0.0);

    StringOut diag;
    REQUIRE(dpci_analysis_diagnostics_json(a, &diag.s) == DPCI_OK);
    CHECK(diag.str().find("iwg_opnorm") != std::string::npos);

    StringOut wcsv;
    REQUIRE(dpci_analysis_whitening_csv(a, &wcsv.s) == DPCI_OK);
    CHECK(wcsv.str().find("t,w1,w2,norm") == 0);

    dpci_analysis_free(a);
    dpci_history_free(h);
    dpci_config_free(cfg);
}

TEST_CASE("history from arrays") {
    const double prices[3] = {0.1, 0.5, 0.9};
    const double demands[3] = {1.0, 0.0, 1.0};
    const double contexts[3] = {0.0, 0.2, -0.3};
    dpci_history* h = nullptr;
    REQUIRE(dpci_history_from_arrays(prices, demands, contexts, 3, 1, &h) == DPCI_OK);
    dpci_history_free(h);
    CHECK(dpci_history_from_arrays(nullptr, demands, contexts, 3, 1, &h) ==
          DPCI_ERR_INVALID_ARGUMENT);
}
