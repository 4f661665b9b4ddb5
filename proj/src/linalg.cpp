#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace dpci {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

double Rng::normal() { return std_normal_quantile(uniform_open()); }

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) s.at(i, i) = 1.0;
    return s;
}

void SymMatrix::add_outer(const Vec& v, double scale) {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            const double w = scale * v[i] * v[j];
            at(i, j) += w;
            if (j != i) at(j, i) = at(i, j);
        }
    }
}

void SymMatrix::add_diag(double scale) {
    for (std::size_t i = 0; i < dim; ++i) at(i, i) += scale;
}

Matrix SymMatrix::to_matrix() const {
    Matrix m(dim, dim);
    m.data = data;
    return m;
}

SymMatrix SymMatrix::from_matrix_symmetrize(const Matrix& m) {
    SymMatrix s(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.rows; ++j)
            s.at(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec matvec(const Matrix& m, const Vec& v) {
    Vec out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        const double* row = &m.data[i * m.cols];
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * v[j];
        out[i] = s;
    }
    return out;
}

Vec symvec(const SymMatrix& s, const Vec& v) {
    Vec out(s.dim, 0.0);
    for (std::size_t i = 0; i < s.dim; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s.dim; ++j) acc += s.at(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double quad_form(const SymMatrix& s, const Vec& v) { return dot(v, symvec(s, v)); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double std_normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::domain_error("std_normal_quantile: prob must lie in (0,1)");

    // Acklam's rational approximation, three regimes.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement against the exact CDF.
    const double e = std_normal_cdf(x) - prob;
    const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double operator_norm(const Matrix& m) {
    const std::size_t n = m.cols;
    if (n == 0 || m.rows == 0) return 0.0;
    Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        // w = m^T (m v)
        Vec mv = matvec(m, v);
        Vec w(n, 0.0);
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double* row = &m.data[i * n];
            const double s = mv[i];
            for (std::size_t j = 0; j < n; ++j) w[j] += row[j] * s;
        }
        const double rayleigh = dot(v, w);
        const double wn = norm2(w);
        if (wn == 0.0) return 0.0;
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / wn;
        if (iter > 0 && std::abs(rayleigh - lambda) < 1e-12) {
            lambda = rayleigh;
            break;
        }
        lambda = rayleigh;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

Matrix cholesky(const SymMatrix& s) {
    const std::size_t n = s.dim;
    const double pivot_tol = 1e-12;
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = s.at(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                if (sum <= pivot_tol)
                    throw FactorizationError(
                        "cholesky: pivot " + std::to_string(i) +
                            " not positive (value " + std::to_string(sum) + ")",
                        i);
                l(i, j) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

EigenDecomposition jacobi_eigen(const SymMatrix& s) {
    const std::size_t n = s.dim;
    Matrix a = s.to_matrix();
    Matrix q = Matrix::identity(n);
    double scale = 0.0;
    for (double v : a.data) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t r = p + 1; r < n; ++r) off += a(p, r) * a(p, r);
        if (std::sqrt(off) < 1e-15 * scale * n) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (std::abs(apr) < 1e-300) continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akr = a(k, r);
                    a(k, p) = c * akp - sn * akr;
                    a(k, r) = sn * akp + c * akr;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), ark = a(r, k);
                    a(p, k) = c * apk - sn * ark;
                    a(r, k) = sn * apk + c * ark;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double qkp = q(k, p), qkr = q(k, r);
                    q(k, p) = c * qkp - sn * qkr;
                    q(k, r) = sn * qkp + c * qkr;
                }
            }
        }
    }

    EigenDecomposition ed;
    ed.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) ed.values[i] = a(i, i);
    // sort ascending, permuting eigenvector columns along
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return ed.values[x] < ed.values[y]; });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = ed.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = q(i, order[j]);
    }
    return out;
}

double min_eigenvalue(const SymMatrix& s) { return jacobi_eigen(s).values.front(); }

SymMatrix clip_eigenvalues(const SymMatrix& s, double floor, bool* clipped) {
    EigenDecomposition ed = jacobi_eigen(s);
    bool any = false;
    for (double& v : ed.values) {
        if (v < floor) {
            v = floor;
            any = true;
        }
    }
    if (clipped) *clipped = any;
    const std::size_t n = s.dim;
    SymMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += ed.vectors(i, k) * ed.values[k] * ed.vectors(j, k);
            out.at(i, j) = acc;
            out.at(j, i) = acc;
        }
    }
    return out;
}

Matrix sym_power(const SymMatrix& s, double exponent, double floor) {
    EigenDecomposition ed = jacobi_eigen(s);
    const std::size_t n = s.dim;
    Vec powered(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(ed.values[k], floor);
        powered[k] = std::pow(lam, exponent);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += ed.vectors(i, k) * powered[k] * ed.vectors(j, k);
            out(i, j) = acc;
        }
    return out;
}

MvnSampler::MvnSampler(Vec mean, const SymMatrix& cov) : mean_(std::move(mean)) {
    if (cov.dim != mean_.size())
        throw std::invalid_argument("mvn: mean/cov dimension mismatch");
    zero_cov_ = true;
    for (double v : cov.data)
        if (v != 0.0) { zero_cov_ = false; break; }
    if (zero_cov_) return;
    try {
        factor_ = cholesky(cov);
    } catch (const FactorizationError&) {
        // near-singular covariance: eigenvalue clipping at 0
        degenerate_fallback_ = true;
        EigenDecomposition ed = jacobi_eigen(cov);
        const std::size_t n = cov.dim;
        factor_ = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                factor_(i, k) = ed.vectors(i, k) * std::sqrt(std::max(ed.values[k], 0.0));
    }
}

Vec MvnSampler::draw(Rng& rng) const {
    if (zero_cov_) return mean_;
    const std::size_t n = mean_.size();
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
    Vec out = mean_;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += factor_(i, k) * z[k];
        out[i] += acc;
    }
    return out;
}

Vec mvn_sample(const Vec& mean, const SymMatrix& cov, Rng& rng) {
    return MvnSampler(mean, cov).draw(rng);
}

}  // namespace dpci
