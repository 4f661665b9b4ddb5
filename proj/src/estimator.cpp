#include "estimator.hpp"

#include <algorithm>
#include <cmath>

namespace dpci {

namespace detail {

std::vector<double> feature_matrix_flat(const History& h, const ModelSpec& spec) {
    const std::size_t dim = spec.dim();
    std::vector<double> flat(h.size() * dim);
    for (std::size_t t = 0; t < h.size(); ++t) {
        const Vec phi = feature(spec.feature_map, h.prices[t], h.contexts[t]);
        std::copy(phi.begin(), phi.end(), flat.begin() + t * dim);
    }
    return flat;
}

// Solve (a + lambda I) x = b via Cholesky with one refinement pass.
Vec ls_solve_sym(SymMatrix a, const Vec& b, double lambda) {
    const std::size_t n = a.dim;
    a.add_diag(lambda);
    Matrix l;
    try {
        l = cholesky(a);
    } catch (const FactorizationError& e) {
        throw RankDeficiencyError(
            "least squares: design is rank deficient (pivot " +
            std::to_string(e.pivot_index) + " vanished and lambda = " +
            std::to_string(lambda) + ")");
    }
    auto solve = [&](const Vec& rhs) {
        Vec y(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = rhs[i];
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
            x[ii] = s / l(ii, ii);
        }
        return x;
    };
    Vec x = solve(b);
    // one iterative-refinement step keeps the normal-equation residual ~machine eps
    Vec r = b;
    Vec ax = symvec(a, x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
    Vec dx = solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
    return x;
}

void LogisticEval::reset(const Vec& new_theta) {
    theta = new_theta;
    value = 0.0;
    grad.assign(theta.size(), 0.0);
    hess = SymMatrix(theta.size());
    rows = 0;
}

void LogisticEval::extend(const FlatData& data, std::size_t upto) {
    const std::size_t dim = theta.size();
    for (std::size_t i = rows; i < upto; ++i) {
        const double* phi = data.phis + i * dim;
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += phi[k] * theta[k];
        s = std::clamp(s, -500.0, 500.0);
        double f;  // sigmoid(s), stable both tails
        double log1pe;
        if (s >= 0.0) {
            const double e = std::exp(-s);
            f = 1.0 / (1.0 + e);
            log1pe = s + std::log1p(e);
        } else {
            const double e = std::exp(s);
            f = e / (1.0 + e);
            log1pe = std::log1p(e);
        }
        value += log1pe - data.demands[i] * s;
        const double gw = f - data.demands[i];
        const double hw = f * (1.0 - f);
        for (std::size_t r = 0; r < dim; ++r) {
            grad[r] += gw * phi[r];
            for (std::size_t c = r; c < dim; ++c) hess.data[r * dim + c] += hw * phi[r] * phi[c];
        }
    }
    rows = upto;
}

namespace {

void mirror_lower(SymMatrix& h) {
    for (std::size_t r = 0; r < h.dim; ++r)
        for (std::size_t c = r + 1; c < h.dim; ++c) h.data[c * h.dim + r] = h.data[r * h.dim + c];
}

double ridged_value(const LogisticEval& e, double lambda) {
    double v = e.value;
    for (double t : e.theta) v += lambda * t * t;
    return v;
}

Vec ridged_grad(const LogisticEval& e, double lambda) {
    Vec g = e.grad;
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += 2.0 * lambda * e.theta[k];
    return g;
}

void project_ball(Vec& theta, double radius) {
    const double n = norm2(theta);
    if (n > radius)
        for (double& v : theta) v *= radius / n;
}

// an iterate pinned to the projection ball is a diverging optimum (e.g.
// separation), not a solution
bool on_projection_boundary(const Vec& theta) {
    return norm2(theta) >= 100.0 * (1.0 - 1e-9);
}

// objective only, for rejected-step halvings
double objective_at(const FlatData& data, double lambda, const Vec& theta) {
    const std::size_t dim = theta.size();
    double value = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double* phi = data.phis + i * dim;
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += phi[k] * theta[k];
        s = std::clamp(s, -500.0, 500.0);
        value += (s >= 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s))) -
                 data.demands[i] * s;
    }
    for (double t : theta) value += lambda * t * t;
    return value;
}

}  // namespace

FitResult logistic_newton(const FlatData& data, double lambda, LogisticEval& cache,
                          double tol, int max_iter) {
    const std::size_t dim = data.dim;
    if (cache.theta.size() != dim || cache.rows > data.n) cache.reset(Vec(dim, 0.0));
    cache.extend(data, data.n);

    Vec best_theta = cache.theta;
    double best_grad = norm2(ridged_grad(cache, lambda));

    FitResult out;
    LogisticEval cand;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Vec grad = ridged_grad(cache, lambda);
        const double gnorm = norm2(grad);
        if (gnorm < best_grad) {
            best_grad = gnorm;
            best_theta = cache.theta;
        }
        if (gnorm < tol && !on_projection_boundary(cache.theta)) {
            // with lambda = 0 a vanishing gradient can also mean numerically
            // separated data (all probabilities saturated at their labels);
            // the unpenalized optimum then sits at infinity
            bool separated = false;
            if (lambda == 0.0 && data.n > 0) {
                separated = true;
                for (std::size_t i = 0; i < data.n && separated; ++i) {
                    const double* phi = data.phis + i * dim;
                    double s = 0.0;
                    for (std::size_t k = 0; k < dim; ++k) s += phi[k] * cache.theta[k];
                    if (std::abs(sigmoid_clamped(s) - data.demands[i]) > 1e-6)
                        separated = false;
                }
            }
            if (!separated) {
                out.theta = cache.theta;
                out.grad_norm = gnorm;
                out.converged = true;
                out.iterations = iter;
                return out;
            }
            break;
        }
        SymMatrix h = cache.hess;
        mirror_lower(h);
        h.add_diag(2.0 * lambda);
        Vec step;
        try {
            step = ls_solve_sym(h, grad, 0.0);
        } catch (const NumericError&) {
            // saturated Hessian: damp with a small ridge proportional to scale
            double tr = 0.0;
            for (std::size_t i = 0; i < dim; ++i) tr += h.at(i, i);
            step = ls_solve_sym(h, grad, std::max(tr / dim, 1.0) * 1e-8);
        }
        const double cur_value = ridged_value(cache, lambda);
        // objective decreases smaller than rounding noise cannot be observed;
        // inside that regime the undamped Newton step is contractive anyway
        const double slack = 1e-12 * (1.0 + std::abs(cur_value));
        const bool in_basin = gnorm < 1e-4;

        // full step first (fused evaluation, reused on acceptance)
        Vec trial = cache.theta;
        for (std::size_t k = 0; k < dim; ++k) trial[k] -= step[k];
        project_ball(trial, 100.0);
        cand.reset(trial);
        cand.extend(data, data.n);
        if (in_basin || ridged_value(cand, lambda) <= cur_value + slack) {
            std::swap(cache, cand);
            continue;
        }
        // halvings with objective-only probes
        double scale = 0.5;
        bool accepted = false;
        for (int halving = 1; halving < 30; ++halving, scale *= 0.5) {
            trial = cache.theta;
            for (std::size_t k = 0; k < dim; ++k) trial[k] -= scale * step[k];
            project_ball(trial, 100.0);
            if (objective_at(data, lambda, trial) <= cur_value + slack) {
                cand.reset(trial);
                cand.extend(data, data.n);
                std::swap(cache, cand);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // no descent left at this scale
    }
    const double gnorm = norm2(ridged_grad(cache, lambda));
    if (gnorm < best_grad) {
        best_grad = gnorm;
        best_theta = cache.theta;
    } else if (best_theta != cache.theta) {
        // leave the cache coherent with the returned iterate
        cand.reset(best_theta);
        cand.extend(data, data.n);
        std::swap(cache, cand);
    }
    out.theta = best_theta;
    out.grad_norm = best_grad;
    out.converged = false;
    out.iterations = max_iter;
    return out;
}


FitResult logistic_newton(const FlatData& data, double lambda, Vec warm_start, double tol,
                          int max_iter) {
    LogisticEval cache;
    cache.reset(std::move(warm_start));
    return logistic_newton(data, lambda, cache, tol, max_iter);
}

}  // namespace detail

Vec fit_least_squares(const History& h, const ModelSpec& spec, std::size_t prefix,
                      double lambda) {
    const std::size_t dim = spec.dim();
    if (prefix > h.size()) throw std::invalid_argument("fit_least_squares: prefix too long");
    if (prefix == 0 && lambda <= 0.0)
        throw RankDeficiencyError("least squares: no data and lambda = 0");
    SymMatrix a(dim);
    Vec b(dim, 0.0);
    for (std::size_t t = 0; t < prefix; ++t) {
        const Vec phi = feature(spec.feature_map, h.prices[t], h.contexts[t]);
        a.add_outer(phi, 1.0);
        for (std::size_t k = 0; k < dim; ++k) b[k] += phi[k] * h.demands[t];
    }
    return detail::ls_solve_sym(std::move(a), b, lambda);
}

FitResult fit_logistic_newton(const History& h, const ModelSpec& spec, std::size_t prefix,
                              double lambda, const Vec& warm_start, double tol,
                              int max_iter) {
    if (prefix > h.size()) throw std::invalid_argument("fit_logistic_newton: prefix too long");
    for (std::size_t t = 0; t < prefix; ++t)
        if (h.demands[t] != 0.0 && h.demands[t] != 1.0)
            throw std::domain_error("fit_logistic_newton: demand must be 0 or 1");
    const std::vector<double> flat = detail::feature_matrix_flat(h, spec);
    detail::FlatData data{flat.data(), h.demands.data(), prefix, spec.dim()};
    Vec theta = warm_start.empty() ? Vec(spec.dim(), 0.0) : warm_start;
    return detail::logistic_newton(data, lambda, std::move(theta), tol, max_iter);
}

PilotSequence pilot_sequence(const History& h, const ModelSpec& spec, double lambda) {
    h.validate(spec);
    const std::size_t dim = spec.dim();
    const std::size_t horizon = h.size();
    PilotSequence out;
    out.estimates.reserve(horizon + 1);
    out.grad_norms.reserve(horizon + 1);
    out.estimates.emplace_back(dim, 0.0);  // no data yet
    out.grad_norms.push_back(0.0);

    const std::vector<double> flat = detail::feature_matrix_flat(h, spec);
    const bool linear = spec.family.kind == Family::linear;

    // incremental normal-equation accumulators for the linear family
    SymMatrix a(dim);
    Vec b(dim, 0.0);
    detail::LogisticEval cache;
    cache.reset(Vec(dim, 0.0));

    for (std::size_t t = 2; t <= horizon + 1; ++t) {
        const std::size_t n = t - 1;
        const double lam = (t == horizon + 1) ? 0.0 : lambda;
        const Vec prev = out.estimates.back();
        if (linear) {
            const double* phi = flat.data() + (n - 1) * dim;
            Vec phiv(phi, phi + dim);
            a.add_outer(phiv, 1.0);
            for (std::size_t k = 0; k < dim; ++k) b[k] += phi[k] * h.demands[n - 1];
            try {
                out.estimates.push_back(detail::ls_solve_sym(a, b, lam));
                out.grad_norms.push_back(0.0);
            } catch (const NumericError&) {
                out.estimates.push_back(prev);
                out.grad_norms.push_back(0.0);
                ++out.fallback_count;
            }
        } else {
            detail::FlatData data{flat.data(), h.demands.data(), n, dim};
            try {
                FitResult fit = detail::logistic_newton(data, lam, cache, 1e-8, 50);
                if (!fit.converged) ++out.nonconverged_count;
                out.estimates.push_back(std::move(fit.theta));
                out.grad_norms.push_back(fit.grad_norm);
            } catch (const NumericError&) {
                out.estimates.push_back(prev);
                out.grad_norms.push_back(0.0);
                cache.reset(prev);
                ++out.fallback_count;
            }
        }
    }
    return out;
}

}  // namespace dpci
