#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <charconv>
#include <cmath>
#include <thread>

#include <json.hpp>

namespace dpci {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string query_label(const std::pair<double, Vec>& q) {
    std::string s = "p=" + fmt(q.first) + ",x=";
    for (std::size_t i = 0; i < q.second.size(); ++i) {
        if (i) s += '|';
        s += fmt(q.second[i]);
    }
    return s;
}

std::string config_json_for_report(const ExperimentConfig& cfg) {
    json j = json::parse(experiment_config_to_json(cfg));
    j.erase("workers");  // execution detail; reports must not depend on it
    return j.dump(2);
}

template <typename Fn>
void parallel_for_indexed(std::size_t n, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

double max_center_deviation(const ModelSpec& spec, const Vec& theta_hat,
                            const UniformGrid& grid) {
    double worst = 0.0;
    for (double p : grid.prices)
        for (const Vec& x : grid.contexts) {
            const double dev = std::abs(mean_demand(spec, theta_hat, p, x) -
                                        mean_demand(spec, spec.theta0, p, x));
            if (dev > worst) worst = dev;
        }
    return worst;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
    TrialRecord rec;
    const std::size_t nq = cfg.queries.size();
    const std::size_t na = cfg.alphas.size();
    auto init = [&](MethodTrialData& m) {
        m.point_cover.assign(nq, std::vector<char>(na, 0));
        m.point_width.assign(nq, std::vector<double>(na, 0.0));
        m.uniform_cover.assign(na, 0);
        m.uniform_halfwidth.assign(na, 0.0);
    };
    init(rec.debiased);
    init(rec.wald);

    try {
        const std::uint64_t seed = Rng::mix(cfg.base_seed, trial_index);
        EpisodeDiagnostics ediag;
        History h = run_episode(cfg.model, cfg.policy, cfg.context, cfg.horizon, seed, &ediag);
        rec.episode_fallbacks = ediag.fit_fallbacks;

        PilotSequence pilots = pilot_sequence(h, cfg.model, cfg.pilot_ridge);
        rec.pilot_fallbacks = pilots.fallback_count;
        rec.pilot_nonconverged = pilots.nonconverged_count;

        WhiteningMatrix w = whiten(h, pilots, cfg.model, cfg.eta());
        DebiasedEstimate est = debias(pilots.final_estimate(), w, h, cfg.model);
        for (double v : est.theta_d)
            if (!std::isfinite(v)) throw NumericError("debiased estimate is not finite");
        rec.wdiag = whitening_diagnostics(w, h, pilots.final_estimate(), cfg.model);

        std::vector<double> z_alpha(na);
        for (std::size_t ai = 0; ai < na; ++ai)
            z_alpha[ai] = std_normal_quantile(1.0 - cfg.alphas[ai] / 2.0);

        for (std::size_t qi = 0; qi < nq; ++qi) {
            const auto& [p, x] = cfg.queries[qi];
            const double f0 = mean_demand(cfg.model, cfg.model.theta0, p, x);
            for (std::size_t ai = 0; ai < na; ++ai) {
                const ConfidenceBand b = pointwise_ci(est, p, x, cfg.alphas[ai], cfg.model);
                // 1e-12 pad keeps exact-degenerate intervals (width 0, center
                // equal to the truth up to rounding) countable as covering
                rec.debiased.point_cover[qi][ai] =
                    (b.lower - 1e-12 <= f0 && f0 <= b.upper + 1e-12);
                rec.debiased.point_width[qi][ai] = b.half_width;
            }
        }

        UniformGrid grid;
        if (cfg.compute_uniform) {
            grid = make_uniform_grid(cfg.model, cfg.grid.price_points,
                                     cfg.grid.context_points, cfg.grid.context_lo,
                                     cfg.grid.context_hi);
            Rng mc_rng(Rng::mix(seed, 0xA11CEULL));
            const Vec a_deb = uniform_max_sample(est.theta_p, est.cov_hat, grid, cfg.model,
                                                 cfg.mc_samples, mc_rng);
            const double dev_deb = max_center_deviation(cfg.model, est.theta_d, grid);
            for (std::size_t ai = 0; ai < na; ++ai) {
                const double s_deb = empirical_quantile(a_deb, 1.0 - cfg.alphas[ai]);
                rec.debiased.uniform_halfwidth[ai] = s_deb;
                rec.debiased.uniform_cover[ai] = dev_deb <= s_deb + 1e-12;
                // 10% slack = three standard errors of the empirical 0.9-quantile
                // at M = 2000
                for (std::size_t qi = 0; qi < nq; ++qi)
                    if (rec.debiased.point_width[qi][ai] > s_deb * 1.10)
                        rec.uniform_contains_pointwise = false;
            }
        }

        const NormalizedErrors ne_deb =
            normalized_errors_debiased(est, h, cfg.model, cfg.queries);
        rec.debiased.est_errors = ne_deb.estimation;
        rec.debiased.pred_errors = ne_deb.prediction;

        // classical baseline; a singular information matrix voids only the
        // Wald cells, not the trial
        try {
            WaldFit wf = wald_fit(h, cfg.model);
            for (std::size_t qi = 0; qi < nq; ++qi) {
                const auto& [p, x] = cfg.queries[qi];
                const double f0 = mean_demand(cfg.model, cfg.model.theta0, p, x);
                for (std::size_t ai = 0; ai < na; ++ai) {
                    const ConfidenceBand wb = wald_ci(wf, p, x, cfg.alphas[ai], cfg.model);
                    rec.wald.point_cover[qi][ai] =
                        (wb.lower - 1e-12 <= f0 && f0 <= wb.upper + 1e-12);
                    rec.wald.point_width[qi][ai] = wb.half_width;
                }
            }
            if (cfg.compute_uniform) {
                // the Wald "band" is the classical pointwise interval read
                // uniformly: cover iff the worst standardized deviation over
                // the grid stays below the pointwise quantile
                double wald_max_stat = 0.0;
                double wald_max_sigma = 0.0;
                for (double p : grid.prices)
                    for (const Vec& x : grid.contexts) {
                        const Vec g = grad_mean_demand(cfg.model, wf.theta, p, x);
                        const double sigma =
                            std::sqrt(std::max(quad_form(wf.information_inv, g), 0.0));
                        const double dev =
                            std::abs(mean_demand(cfg.model, wf.theta, p, x) -
                                     mean_demand(cfg.model, cfg.model.theta0, p, x));
                        if (sigma > wald_max_sigma) wald_max_sigma = sigma;
                        if (sigma > 0.0) {
                            const double stat = dev / sigma;
                            if (stat > wald_max_stat) wald_max_stat = stat;
                        } else if (dev > 0.0) {
                            wald_max_stat = std::numeric_limits<double>::infinity();
                        }
                    }
                for (std::size_t ai = 0; ai < na; ++ai) {
                    rec.wald.uniform_halfwidth[ai] = z_alpha[ai] * wald_max_sigma;
                    rec.wald.uniform_cover[ai] = wald_max_stat <= z_alpha[ai];
                }
            }
            const NormalizedErrors ne_wald =
                normalized_errors_wald(wf, cfg.model, cfg.queries);
            rec.wald.est_errors = ne_wald.estimation;
            rec.wald.pred_errors = ne_wald.prediction;
        } catch (const std::exception& e) {
            rec.wald_failed = true;
            rec.wald_fail_reason = e.what();
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.fail_reason = e.what();
    }
    return rec;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<TrialRecord> records(cfg.n_trials);
    parallel_for_indexed(cfg.n_trials, cfg.workers,
                         [&](std::size_t i) { records[i] = run_trial(cfg, i); });
    return records;
}

const CoverageCell* CoverageReport::find(const std::string& method, const std::string& query,
                                         double alpha) const {
    for (const auto& c : cells)
        if (c.method == method && c.query == query && std::abs(c.alpha - alpha) < 1e-12)
            return &c;
    return nullptr;
}

CoverageReport aggregate_coverage(const ExperimentConfig& cfg,
                                  const std::vector<TrialRecord>& records) {
    CoverageReport rep;
    rep.config_json = config_json_for_report(cfg);
    rep.csv_header = csv_metadata_header(cfg);
    rep.n_trials = records.size();

    std::vector<const TrialRecord*> ok;
    ok.reserve(records.size());
    for (const auto& r : records)
        if (r.failed)
            ++rep.failures;
        else
            ok.push_back(&r);

    const std::size_t nq = cfg.queries.size();
    const std::size_t na = cfg.alphas.size();
    // Wald-only failures void the Wald cells but keep the trial
    std::vector<const TrialRecord*> ok_wald;
    for (const TrialRecord* r : ok)
        if (!r->wald_failed) ok_wald.push_back(r);

    auto push_cells = [&](const std::string& method, auto member,
                          const std::vector<const TrialRecord*>& rows) {
        const std::size_t cell_failures = records.size() - rows.size();
        for (std::size_t qi = 0; qi < nq; ++qi) {
            for (std::size_t ai = 0; ai < na; ++ai) {
                CoverageCell c;
                c.method = method;
                c.query = query_label(cfg.queries[qi]);
                c.alpha = cfg.alphas[ai];
                c.failures = cell_failures;
                double width_sum = 0.0;
                for (const TrialRecord* r : rows) {
                    const MethodTrialData& m = r->*member;
                    c.hits += m.point_cover[qi][ai] ? 1 : 0;
                    width_sum += m.point_width[qi][ai];
                }
                c.trials = rows.size();
                c.rate = c.trials ? static_cast<double>(c.hits) / c.trials : 0.0;
                c.halfwidth95 = binomial_halfwidth95(c.rate, c.trials);
                c.mean_width = c.trials ? 2.0 * width_sum / c.trials : 0.0;
                rep.cells.push_back(std::move(c));
            }
        }
        if (cfg.compute_uniform) {
            for (std::size_t ai = 0; ai < na; ++ai) {
                CoverageCell c;
                c.method = method;
                c.query = "uniform";
                c.alpha = cfg.alphas[ai];
                c.failures = cell_failures;
                double width_sum = 0.0;
                for (const TrialRecord* r : rows) {
                    const MethodTrialData& m = r->*member;
                    c.hits += m.uniform_cover[ai] ? 1 : 0;
                    width_sum += m.uniform_halfwidth[ai];
                }
                c.trials = rows.size();
                c.rate = c.trials ? static_cast<double>(c.hits) / c.trials : 0.0;
                c.halfwidth95 = binomial_halfwidth95(c.rate, c.trials);
                c.mean_width = c.trials ? 2.0 * width_sum / c.trials : 0.0;
                rep.cells.push_back(std::move(c));
            }
        }
    };
    push_cells("debiased", &TrialRecord::debiased, ok);
    push_cells("wald", &TrialRecord::wald, ok_wald);

    Vec iwg, cube, lmin;
    double clip_sum = 0.0;
    std::size_t contains = 0;
    for (const TrialRecord* r : ok) {
        iwg.push_back(r->wdiag.iwg_opnorm);
        cube.push_back(r->wdiag.cube_sum);
        lmin.push_back(r->wdiag.lambda_min_wdw);
        clip_sum += r->wdiag.clip_fraction;
        rep.pilot_fallback_total += r->pilot_fallbacks;
        rep.episode_fallback_total += r->episode_fallbacks;
        if (r->uniform_contains_pointwise) ++contains;
    }
    rep.iwg_opnorm_median = median(iwg);
    rep.cube_sum_median = median(cube);
    rep.lambda_min_median = median(lmin);
    rep.clip_fraction_mean = ok.empty() ? 0.0 : clip_sum / ok.size();
    rep.uniform_contains_pointwise_rate =
        ok.empty() ? 0.0 : static_cast<double>(contains) / ok.size();
    return rep;
}

CoverageReport coverage_experiment(const ExperimentConfig& cfg) {
    const std::vector<TrialRecord> records = run_trials(cfg);
    CoverageReport rep = aggregate_coverage(cfg, records);
    if (10 * rep.failures > rep.n_trials)
        throw ExperimentError("coverage experiment: " + std::to_string(rep.failures) + "/" +
                              std::to_string(rep.n_trials) + " trials failed");
    return rep;
}

std::string CoverageReport::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "coverage";
    j["config"] = json::parse(config_json);
    json cells_j = json::array();
    for (const auto& c : cells) {
        cells_j.push_back({{"method", c.method},
                           {"query", c.query},
                           {"alpha", c.alpha},
                           {"level", 1.0 - c.alpha},
                           {"hits", c.hits},
                           {"trials", c.trials},
                           {"failures", c.failures},
                           {"rate", c.rate},
                           {"halfwidth95", c.halfwidth95},
                           {"mean_width", c.mean_width}});
    }
    j["cells"] = cells_j;
    j["diagnostics"] = {{"n_trials", n_trials},
                        {"failures", failures},
                        {"iwg_opnorm_median", iwg_opnorm_median},
                        {"cube_sum_median", cube_sum_median},
                        {"lambda_min_median", lambda_min_median},
                        {"clip_fraction_mean", clip_fraction_mean},
                        {"pilot_fallback_total", pilot_fallback_total},
                        {"episode_fallback_total", episode_fallback_total},
                        {"uniform_contains_pointwise_rate", uniform_contains_pointwise_rate}};
    return j.dump(2);
}

std::string csv_metadata_header(const ExperimentConfig& cfg) {
    std::string s;
    s += "# dpci schema=1 kind=experiment\n";
    s += "# config=" + cfg.name + " T=" + std::to_string(cfg.horizon) +
         " trials=" + std::to_string(cfg.n_trials) + " seed=" + std::to_string(cfg.base_seed) +
         "\n";
    s += "# upsilon=" + fmt(cfg.upsilon) + " eta=" + fmt(cfg.eta()) +
         " M=" + std::to_string(cfg.mc_samples) + " grid=" +
         std::to_string(cfg.grid.price_points) + "x" + std::to_string(cfg.grid.context_points) +
         "\n";
    std::string pol;
    switch (cfg.policy.kind) {
        case PolicyKind::epsilon_greedy:
            pol = "epsilon_greedy epsilon=" + fmt(cfg.policy.epsilon);
            break;
        case PolicyKind::ucb:
            pol = "ucb scale=" + fmt(cfg.policy.ucb_scale) +
                  " lambda=" + fmt(cfg.policy.ucb_lambda);
            break;
        case PolicyKind::fixed_random:
            pol = "fixed_random";
            break;
    }
    s += "# policy=" + pol + " price_grid=" + std::to_string(cfg.policy.price_grid_size) +
         " pilot_ridge=" + fmt(cfg.pilot_ridge) + "\n";
    return s;
}

std::string CoverageReport::to_csv() const {
    std::string s = csv_header;
    s += "method,query,alpha,level,hits,trials,failures,rate,halfwidth95,mean_width\n";
    for (const auto& c : cells) {
        s += c.method + ",\"" + c.query + "\"," + fmt(c.alpha) + "," + fmt(1.0 - c.alpha) +
             "," + std::to_string(c.hits) + "," + std::to_string(c.trials) + "," +
             std::to_string(c.failures) + "," + fmt(c.rate) + "," + fmt(c.halfwidth95) + "," +
             fmt(c.mean_width) + "\n";
    }
    return s;
}

std::vector<std::pair<std::string, std::string>> CoverageReport::files() const {
    return {{"coverage.json", to_json()}, {"coverage.csv", to_csv()}};
}

const ErrorSeries* ErrorDistributionReport::find(const std::string& name) const {
    for (const auto& s : series)
        if (s.name == name) return &s;
    return nullptr;
}

ErrorDistributionReport aggregate_errors(const ExperimentConfig& cfg,
                                         const std::vector<TrialRecord>& records) {
    ErrorDistributionReport rep;
    rep.config_json = config_json_for_report(cfg);
    rep.csv_header = csv_metadata_header(cfg);
    rep.n_trials = records.size();

    const std::size_t dim = cfg.model.dim();
    const std::size_t nq = cfg.queries.size();
    for (std::size_t i = 0; i < dim; ++i)
        rep.series.push_back({"eps_debiased_" + std::to_string(i + 1), {}});
    for (std::size_t i = 0; i < dim; ++i)
        rep.series.push_back({"eps_wald_" + std::to_string(i + 1), {}});
    for (std::size_t q = 0; q < nq; ++q)
        rep.series.push_back({"pred_debiased_q" + std::to_string(q + 1), {}});
    for (std::size_t q = 0; q < nq; ++q)
        rep.series.push_back({"pred_wald_q" + std::to_string(q + 1), {}});

    for (const auto& r : records) {
        if (r.failed) {
            ++rep.failures;
            continue;
        }
        std::size_t s = 0;
        for (std::size_t i = 0; i < dim; ++i) rep.series[s++].values.push_back(r.debiased.est_errors[i]);
        for (std::size_t i = 0; i < dim; ++i)
            if (!r.wald_failed) rep.series[s + i].values.push_back(r.wald.est_errors[i]);
        s += dim;
        for (std::size_t q = 0; q < nq; ++q) rep.series[s++].values.push_back(r.debiased.pred_errors[q]);
        for (std::size_t q = 0; q < nq; ++q)
            if (!r.wald_failed) rep.series[s + q].values.push_back(r.wald.pred_errors[q]);
    }
    return rep;
}

ErrorDistributionReport error_distribution_experiment(const ExperimentConfig& cfg) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.compute_uniform = false;  // error histograms need no uniform bands
    const std::vector<TrialRecord> records = run_trials(run_cfg);
    ErrorDistributionReport rep = aggregate_errors(cfg, records);
    if (10 * rep.failures > rep.n_trials)
        throw ExperimentError("error experiment: too many failed trials");
    return rep;
}

std::string ErrorDistributionReport::to_csv() const {
    std::string s = csv_header + "row";
    for (const auto& ser : series) s += "," + ser.name;
    s += "\n";
    std::size_t n = 0;
    for (const auto& ser : series) n = std::max(n, ser.values.size());
    for (std::size_t i = 0; i < n; ++i) {
        s += std::to_string(i + 1);
        for (const auto& ser : series) {
            s += ',';
            if (i < ser.values.size()) s += fmt(ser.values[i]);
        }
        s += '\n';
    }
    return s;
}

std::string ErrorDistributionReport::summary_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "errors";
    j["config"] = json::parse(config_json);
    j["n_trials"] = n_trials;
    j["failures"] = failures;
    json per = json::object();
    for (const auto& ser : series) {
        per[ser.name] = {{"mean", mean(ser.values)},
                         {"variance", sample_variance(ser.values)},
                         {"ks_vs_normal", ks_vs_standard_normal(ser.values)},
                         {"count", ser.values.size()}};
    }
    j["series"] = per;
    return j.dump(2);
}

std::string ErrorDistributionReport::histogram_csv() const {
    const double lo = -6.0, hi = 6.0, width = 0.25;
    const int nbins = static_cast<int>((hi - lo) / width);
    std::string s = csv_header;
    s += "series,bin_lo,bin_hi,count\n";
    for (const auto& ser : series) {
        std::vector<std::size_t> counts(nbins + 2, 0);  // [under][bins][over]
        for (double v : ser.values) {
            if (v < lo)
                ++counts[0];
            else if (v >= hi)
                ++counts[nbins + 1];
            else
                ++counts[1 + static_cast<int>((v - lo) / width)];
        }
        s += ser.name + ",-inf," + fmt(lo) + "," + std::to_string(counts[0]) + "\n";
        for (int b = 0; b < nbins; ++b)
            s += ser.name + "," + fmt(lo + b * width) + "," + fmt(lo + (b + 1) * width) + "," +
                 std::to_string(counts[b + 1]) + "\n";
        s += ser.name + "," + fmt(hi) + ",inf," + std::to_string(counts[nbins + 1]) + "\n";
    }
    return s;
}

std::vector<std::pair<std::string, std::string>> ErrorDistributionReport::files() const {
    return {{"errors.csv", to_csv()},
            {"errors_summary.json", summary_json()},
            {"errors_hist.csv", histogram_csv()}};
}

DiagnoseReport diagnose_experiment(const ExperimentConfig& base,
                                   const std::vector<std::size_t>& horizons,
                                   std::size_t n_trials) {
    base.validate();
    if (horizons.empty()) throw ConfigError("diagnose: need at least one horizon");
    DiagnoseReport rep;
    rep.config_json = config_json_for_report(base);
    rep.csv_header = csv_metadata_header(base);
    for (const std::size_t horizon : horizons) {
        ExperimentConfig cfg = base;
        cfg.horizon = horizon;
        cfg.n_trials = n_trials;

        struct Cell {
            double iwg = 0.0, cube = 0.0, lmin = 0.0, clip = 0.0, perr = 0.0;
            bool failed = false;
        };
        std::vector<Cell> cells(n_trials);
        parallel_for_indexed(n_trials, cfg.workers, [&](std::size_t i) {
            try {
                const std::uint64_t seed = Rng::mix(cfg.base_seed, i);
                History h =
                    run_episode(cfg.model, cfg.policy, cfg.context, cfg.horizon, seed, nullptr);
                PilotSequence pilots = pilot_sequence(h, cfg.model, cfg.pilot_ridge);
                WhiteningMatrix w = whiten(h, pilots, cfg.model, cfg.eta());
                WhiteningDiagnostics d =
                    whitening_diagnostics(w, h, pilots.final_estimate(), cfg.model);
                Vec delta = pilots.final_estimate();
                for (std::size_t k = 0; k < delta.size(); ++k) delta[k] -= cfg.model.theta0[k];
                cells[i] = {d.iwg_opnorm, d.cube_sum, d.lambda_min_wdw, d.clip_fraction,
                            norm2(delta), false};
            } catch (const std::exception&) {
                cells[i].failed = true;
            }
        });

        DiagnoseRow row;
        row.horizon = horizon;
        row.eta = cfg.eta();
        Vec iwg, cube, lmin, perr;
        double clip_sum = 0.0;
        for (const Cell& c : cells) {
            if (c.failed) continue;
            iwg.push_back(c.iwg);
            cube.push_back(c.cube);
            lmin.push_back(c.lmin);
            perr.push_back(c.perr);
            clip_sum += c.clip;
        }
        row.trials = iwg.size();
        row.iwg_median = median(iwg);
        row.iwg_over_eta_sqrt_t =
            row.iwg_median / (row.eta * std::sqrt(static_cast<double>(horizon)));
        row.cube_sum_median = median(cube);
        row.lambda_min_median = median(lmin);
        row.clip_fraction_mean = row.trials ? clip_sum / row.trials : 0.0;
        row.pilot_err_median = median(perr);
        rep.rows.push_back(row);
    }
    return rep;
}

std::string DiagnoseReport::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "diagnose";
    j["config"] = json::parse(config_json);
    json rows_j = json::array();
    for (const auto& r : rows) {
        rows_j.push_back({{"horizon", r.horizon},
                          {"eta", r.eta},
                          {"iwg_median", r.iwg_median},
                          {"iwg_over_eta_sqrt_t", r.iwg_over_eta_sqrt_t},
                          {"cube_sum_median", r.cube_sum_median},
                          {"lambda_min_median", r.lambda_min_median},
                          {"clip_fraction_mean", r.clip_fraction_mean},
                          {"pilot_err_median", r.pilot_err_median},
                          {"trials", r.trials}});
    }
    j["rows"] = rows_j;
    return j.dump(2);
}

std::string DiagnoseReport::to_csv() const {
    std::string s = csv_header;
    s +=
        "horizon,eta,iwg_median,iwg_over_eta_sqrt_t,cube_sum_median,lambda_min_median,"
        "clip_fraction_mean,pilot_err_median,trials\n";
    for (const auto& r : rows) {
        s += std::to_string(r.horizon) + "," + fmt(r.eta) + "," + fmt(r.iwg_median) + "," +
             fmt(r.iwg_over_eta_sqrt_t) + "," + fmt(r.cube_sum_median) + "," +
             fmt(r.lambda_min_median) + "," + fmt(r.clip_fraction_mean) + "," +
             fmt(r.pilot_err_median) + "," + std::to_string(r.trials) + "\n";
    }
    return s;
}

std::vector<std::pair<std::string, std::string>> DiagnoseReport::files() const {
    return {{"diagnose.json", to_json()}, {"diagnose.csv", to_csv()}};
}

SimulateReport simulate_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::uint64_t seed = Rng::mix(cfg.base_seed, 0);
    History h = run_episode(cfg.model, cfg.policy, cfg.context, cfg.horizon, seed, nullptr);
    SimulateReport rep;
    rep.config_json = config_json_for_report(cfg);
    rep.episode_csv = csv_metadata_header(cfg) + history_to_csv(h);
    return rep;
}

std::vector<std::pair<std::string, std::string>> SimulateReport::files() const {
    return {{"episode.csv", episode_csv}};
}

}  // namespace dpci
