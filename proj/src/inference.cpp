#include "inference.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace dpci {

UniformGrid make_uniform_grid(const ModelSpec& spec, std::size_t n_prices,
                              std::size_t n_contexts, double ctx_lo, double ctx_hi) {
    if (n_prices == 0 || n_contexts == 0)
        throw std::invalid_argument("uniform grid: empty axis");
    if (spec.context_dim != 1)
        throw ConfigError("uniform grid: only scalar contexts are supported");
    UniformGrid g;
    g.prices.resize(n_prices);
    for (std::size_t i = 0; i < n_prices; ++i)
        g.prices[i] = n_prices == 1
                          ? spec.p_min
                          : spec.p_min + (spec.p_max - spec.p_min) * static_cast<double>(i) /
                                             static_cast<double>(n_prices - 1);
    g.contexts.resize(n_contexts);
    for (std::size_t j = 0; j < n_contexts; ++j) {
        const double x = n_contexts == 1
                             ? ctx_lo
                             : ctx_lo + (ctx_hi - ctx_lo) * static_cast<double>(j) /
                                            static_cast<double>(n_contexts - 1);
        g.contexts[j] = Vec{x};
    }
    return g;
}

DebiasedEstimate debias(const Vec& theta_p, const WhiteningMatrix& w, const History& h,
                        const ModelSpec& spec) {
    const std::size_t horizon = h.size();
    if (w.horizon() != horizon)
        throw std::invalid_argument("debias: whitening horizon does not match history");
    const std::size_t d = spec.dim();

    DebiasedEstimate est;
    est.theta_p = theta_p;
    est.whitening = &w;
    est.theta_d = theta_p;
    est.d_hat.resize(horizon);
    SymMatrix cov(d);
    Vec col(d);
    for (std::size_t t = 0; t < horizon; ++t) {
        const double f_hat = mean_demand(spec, theta_p, h.prices[t], h.contexts[t]);
        const double resid = h.demands[t] - f_hat;
        for (std::size_t i = 0; i < d; ++i) {
            col[i] = w.columns(i, t);
            est.theta_d[i] += col[i] * resid;
        }
        est.d_hat[t] = variance_fn(spec, theta_p, h.prices[t], h.contexts[t]);
        cov.add_outer(col, est.d_hat[t]);
    }
    est.cov_hat = std::move(cov);
    return est;
}

namespace {

SymMatrix psd_or_clipped(const SymMatrix& cov, bool* clipped) {
    // the exactly-zero covariance is a legitimate degenerate case (handled by
    // the sampler); otherwise keep the matrix when it factorizes and raise
    // eigenvalues to the 1e-12 floor when it does not
    bool zero = true;
    for (double v : cov.data)
        if (v != 0.0) { zero = false; break; }
    if (zero) {
        if (clipped) *clipped = false;
        return cov;
    }
    try {
        (void)cholesky(cov);
        if (clipped) *clipped = false;
        return cov;
    } catch (const FactorizationError&) {
        bool any = false;
        SymMatrix fixed = clip_eigenvalues(cov, 1e-12, &any);
        if (clipped) *clipped = any;
        return fixed;
    }
}

}  // namespace

ConfidenceBand pointwise_ci(const DebiasedEstimate& est, double p, const Vec& x,
                            double alpha, const ModelSpec& spec) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("pointwise_ci: alpha must lie in (0,1)");
    const Vec g = grad_mean_demand(spec, est.theta_p, p, x);
    double var = quad_form(est.cov_hat, g);
    if (var < 0.0) {
        if (var < -1e-10) throw NumericError("pointwise_ci: covariance not PSD");
        var = 0.0;
    }
    const double z = std_normal_quantile(1.0 - alpha / 2.0);
    ConfidenceBand band;
    band.kind = BandKind::pointwise;
    band.alpha = alpha;
    band.center = mean_demand(spec, est.theta_d, p, x);
    band.half_width = z * std::sqrt(var);
    band.lower = band.center - band.half_width;
    band.upper = band.center + band.half_width;
    band.center_theta = est.theta_d;
    return band;
}

Vec uniform_max_sample(const Vec& grad_theta, const SymMatrix& cov,
                       const UniformGrid& grid, const ModelSpec& spec, std::size_t m_samples,
                       Rng& rng, bool* degenerate) {
    const std::size_t d = cov.dim;
    bool clipped = false;
    const SymMatrix cov_use = psd_or_clipped(cov, &clipped);
    if (degenerate) *degenerate = clipped;
    MvnSampler sampler(Vec(d, 0.0), cov_use);

    // gradients over the grid are fixed; precompute once
    std::vector<Vec> grads;
    grads.reserve(grid.prices.size() * grid.contexts.size());
    for (double p : grid.prices)
        for (const Vec& x : grid.contexts)
            grads.push_back(grad_mean_demand(spec, grad_theta, p, x));

    Vec a(m_samples, 0.0);
    for (std::size_t m = 0; m < m_samples; ++m) {
        const Vec zeta = sampler.draw(rng);
        double best = 0.0;
        for (const Vec& g : grads) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) s += g[k] * zeta[k];
            s = std::abs(s);
            if (s > best) best = s;
        }
        a[m] = best;
    }
    return a;
}

double empirical_quantile(Vec values, double q) {
    if (values.empty()) throw std::domain_error("empirical_quantile: empty input");
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("empirical_quantile: q must lie in (0,1)");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return values[k - 1];
}

ConfidenceBand uniform_ci(const DebiasedEstimate& est, double alpha, std::size_t m_samples,
                          const UniformGrid& grid, const ModelSpec& spec, Rng& rng) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("uniform_ci: alpha must lie in (0,1)");
    if (m_samples < 100) throw std::invalid_argument("uniform_ci: need at least 100 samples");
    bool degenerate = false;
    Vec a = uniform_max_sample(est.theta_p, est.cov_hat, grid, spec, m_samples, rng,
                               &degenerate);
    ConfidenceBand band;
    band.kind = BandKind::uniform;
    band.alpha = alpha;
    band.half_width = empirical_quantile(std::move(a), 1.0 - alpha);
    band.center_theta = est.theta_d;
    band.grid_prices = grid.prices.size();
    band.grid_contexts = grid.contexts.size();
    band.mc_samples = m_samples;
    return band;
}

WaldFit wald_fit(const History& h, const ModelSpec& spec) {
    const std::size_t d = spec.dim();
    WaldFit fit;
    if (spec.family.kind == Family::logistic) {
        FitResult r = fit_logistic_newton(h, spec, h.size(), 0.0, Vec(d, 0.0));
        fit.theta = std::move(r.theta);
    } else {
        fit.theta = fit_least_squares(h, spec, h.size(), 0.0);
    }
    // sample information: sum of gradient outer products over the plug-in
    // conditional variance (equals the negative log-likelihood Hessian for
    // both families)
    SymMatrix info(d);
    for (std::size_t t = 0; t < h.size(); ++t) {
        const Vec g = grad_mean_demand(spec, fit.theta, h.prices[t], h.contexts[t]);
        const double var = variance_fn(spec, fit.theta, h.prices[t], h.contexts[t]);
        if (var <= 0.0) continue;
        info.add_outer(g, 1.0 / var);
    }
    fit.information = info;

    Matrix l;
    try {
        l = cholesky(info);
    } catch (const FactorizationError&) {
        const EigenDecomposition ed = jacobi_eigen(info);
        const double cond = ed.values.back() / std::max(ed.values.front(), 1e-300);
        throw NumericError("wald: singular information matrix (condition number " +
                           std::to_string(cond) + ")");
    }
    // invert from the Cholesky factor
    SymMatrix inv(d);
    for (std::size_t col = 0; col < d; ++col) {
        Vec e(d, 0.0), y(d), x(d);
        e[col] = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            double s = e[i];
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (std::size_t ii = d; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < d; ++k) s -= l(k, ii) * x[k];
            x[ii] = s / l(ii, ii);
        }
        for (std::size_t i = 0; i < d; ++i) inv.at(i, col) = x[i];
    }
    // symmetrize against round-off
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = 0.5 * (inv.at(i, j) + inv.at(j, i));
            inv.at(i, j) = v;
            inv.at(j, i) = v;
        }
    fit.information_inv = std::move(inv);
    return fit;
}

ConfidenceBand wald_ci(const WaldFit& fit, double p, const Vec& x, double alpha,
                       const ModelSpec& spec) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("wald_ci: alpha must lie in (0,1)");
    const Vec g = grad_mean_demand(spec, fit.theta, p, x);
    const double var = std::max(quad_form(fit.information_inv, g), 0.0);
    const double z = std_normal_quantile(1.0 - alpha / 2.0);
    ConfidenceBand band;
    band.kind = BandKind::wald_pointwise;
    band.alpha = alpha;
    band.center = mean_demand(spec, fit.theta, p, x);
    band.half_width = z * std::sqrt(var);
    band.lower = band.center - band.half_width;
    band.upper = band.center + band.half_width;
    band.center_theta = fit.theta;
    return band;
}

ConfidenceBand wald_ci(const History& h, const ModelSpec& spec, double p, const Vec& x,
                       double alpha) {
    return wald_ci(wald_fit(h, spec), p, x, alpha, spec);
}

NormalizedErrors normalized_errors_debiased(const DebiasedEstimate& est, const History& h,
                                            const ModelSpec& spec,
                                            const std::vector<std::pair<double, Vec>>& queries) {
    const std::size_t d = spec.dim();
    // true-variance covariance W D W^T (D at theta0), per the limiting law
    const SymMatrix cov_true = whitened_covariance(*est.whitening, h, spec.theta0, spec);
    const Matrix inv_sqrt = sym_power(cov_true, -0.5);
    Vec delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = est.theta_d[i] - spec.theta0[i];

    NormalizedErrors out;
    out.estimation = matvec(inv_sqrt, delta);
    out.prediction.reserve(queries.size());
    for (const auto& [p, x] : queries) {
        const Vec g = grad_mean_demand(spec, est.theta_p, p, x);
        const double sigma = std::sqrt(std::max(quad_form(est.cov_hat, g), 0.0));
        const double diff = mean_demand(spec, est.theta_d, p, x) -
                            mean_demand(spec, spec.theta0, p, x);
        out.prediction.push_back(sigma > 0.0 ? diff / sigma : 0.0);
    }
    return out;
}

NormalizedErrors normalized_errors_wald(const WaldFit& fit, const ModelSpec& spec,
                                        const std::vector<std::pair<double, Vec>>& queries) {
    const std::size_t d = spec.dim();
    const Matrix info_sqrt = sym_power(fit.information, 0.5);
    Vec delta(d);
    for (std::size_t i = 0; i < d; ++i) delta[i] = fit.theta[i] - spec.theta0[i];

    NormalizedErrors out;
    out.estimation = matvec(info_sqrt, delta);
    out.prediction.reserve(queries.size());
    for (const auto& [p, x] : queries) {
        const Vec g = grad_mean_demand(spec, fit.theta, p, x);
        const double sigma = std::sqrt(std::max(quad_form(fit.information_inv, g), 0.0));
        const double diff = mean_demand(spec, fit.theta, p, x) -
                            mean_demand(spec, spec.theta0, p, x);
        out.prediction.push_back(sigma > 0.0 ? diff / sigma : 0.0);
    }
    return out;
}

std::string band_to_json(const ConfidenceBand& band) {
    nlohmann::json j;
    switch (band.kind) {
        case BandKind::pointwise: j["method"] = "debiased_pointwise"; break;
        case BandKind::uniform: j["method"] = "debiased_uniform"; break;
        case BandKind::wald_pointwise: j["method"] = "wald_pointwise"; break;
        case BandKind::wald_uniform: j["method"] = "wald_uniform"; break;
    }
    j["alpha"] = band.alpha;
    j["half_width"] = band.half_width;
    if (band.kind == BandKind::pointwise || band.kind == BandKind::wald_pointwise) {
        j["center"] = band.center;
        j["lower"] = band.lower;
        j["upper"] = band.upper;
    } else {
        j["center_theta"] = band.center_theta;
        j["grid"] = {{"prices", band.grid_prices}, {"contexts", band.grid_contexts}};
        j["mc_samples"] = band.mc_samples;
    }
    return j.dump(2);
}

}  // namespace dpci
