#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

double normal_cdf_series(double x) {
    // erf(z) = (2/sqrt(pi)) e^{-z^2} sum_k (2z^2)^k z / (2k+1)!!
    const double z = x / std::sqrt(2.0);
    if (z > 8.0) return 1.0;
    if (z < -8.0) return 0.0;
    double term = z;
    double sum = z;
    const double z2 = 2.0 * z * z;
    for (int k = 1; k < 300; ++k) {
        term *= z2 / (2.0 * k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    const double erf = 2.0 / std::sqrt(M_PI) * std::exp(-z * z) * sum;
    return 0.5 * (1.0 + erf);
}

double normal_quantile_bisect(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile oracle: p out of range");
    double lo = -13.0, hi = 13.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf_series(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double svd_opnorm(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
    // one-sided Jacobi: rotate column pairs of a working copy until all
    // pairs are orthogonal; singular values are the column norms
    std::vector<double> w = a;
    auto col_dot = [&](std::size_t p, std::size_t q) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += w[i * cols + p] * w[i * cols + q];
        return s;
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                const double apq = col_dot(p, q);
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double vip = w[i * cols + p], viq = w[i * cols + q];
                    w[i * cols + p] = c * vip - s * viq;
                    w[i * cols + q] = s * vip + c * viq;
                }
            }
        }
        if (!rotated) break;
    }
    double best = 0.0;
    for (std::size_t p = 0; p < cols; ++p) {
        const double n = std::sqrt(col_dot(p, p));
        if (n > best) best = n;
    }
    return best;
}

Vec qr_solve(const std::vector<double>& a, std::size_t rows, std::size_t cols, const Vec& b) {
    std::vector<double> r = a;
    Vec y = b;
    // Householder triangularization applied to [A | b]
    for (std::size_t k = 0; k < cols; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < rows; ++i) norm += r[i * cols + k] * r[i * cols + k];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("qr oracle: rank deficient");
        const double alpha = r[k * cols + k] >= 0 ? -norm : norm;
        std::vector<double> v(rows, 0.0);
        v[k] = r[k * cols + k] - alpha;
        for (std::size_t i = k + 1; i < rows; ++i) v[i] = r[i * cols + k];
        double vtv = 0.0;
        for (std::size_t i = k; i < rows; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        for (std::size_t j = k; j < cols; ++j) {
            double vta = 0.0;
            for (std::size_t i = k; i < rows; ++i) vta += v[i] * r[i * cols + j];
            const double f = 2.0 * vta / vtv;
            for (std::size_t i = k; i < rows; ++i) r[i * cols + j] -= f * v[i];
        }
        double vtb = 0.0;
        for (std::size_t i = k; i < rows; ++i) vtb += v[i] * y[i];
        const double f = 2.0 * vtb / vtv;
        for (std::size_t i = k; i < rows; ++i) y[i] -= f * v[i];
    }
    Vec x(cols, 0.0);
    for (std::size_t kk = cols; kk-- > 0;) {
        double s = y[kk];
        for (std::size_t j = kk + 1; j < cols; ++j) s -= r[kk * cols + j] * x[j];
        x[kk] = s / r[kk * cols + kk];
    }
    return x;
}

Vec logistic_gd(const std::vector<double>& phis, const Vec& demands, std::size_t n,
                std::size_t dim, double lambda_total, std::size_t max_steps, double step) {
    Vec theta(dim, 0.0);
    Vec grad(dim);
    for (std::size_t it = 0; it < max_steps; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += phis[i * dim + k] * theta[k];
            const double f = 1.0 / (1.0 + std::exp(-s));
            const double w = f - demands[i];
            for (std::size_t k = 0; k < dim; ++k) grad[k] += w * phis[i * dim + k];
        }
        double gn = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            grad[k] = grad[k] / n + 2.0 * lambda_total * theta[k] / n;
            gn += grad[k] * grad[k];
        }
        if (std::sqrt(gn) < 1e-12) break;
        for (std::size_t k = 0; k < dim; ++k) theta[k] -= step * grad[k];
    }
    return theta;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, Vec x, double h) {
    Vec g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double orig = x[k];
        x[k] = orig + h;
        const double up = f(x);
        x[k] = orig - h;
        const double dn = f(x);
        x[k] = orig;
        g[k] = (up - dn) / (2.0 * h);
    }
    return g;
}

double dense_grid_argmax(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t n_points) {
    double best_x = lo, best_v = f(lo);
    for (std::size_t i = 1; i < n_points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace oracle
