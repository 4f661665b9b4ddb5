#pragma once

#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace dpci {

using Vec = std::vector<double>;

// Dense row-major matrix. Sized for small d (typically 2-10) on one side;
// the other side may be the horizon T.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    static Matrix identity(std::size_t n);
};

// Symmetric matrix with full storage; symmetry is maintained by construction
// (updates write both triangles from one computed value).
struct SymMatrix {
    std::size_t dim = 0;
    std::vector<double> data;

    SymMatrix() = default;
    explicit SymMatrix(std::size_t n, double fill = 0.0) : dim(n), data(n * n, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

    static SymMatrix identity(std::size_t n);
    // S += scale * v v^T
    void add_outer(const Vec& v, double scale);
    // S += scale * I
    void add_diag(double scale);
    Matrix to_matrix() const;
    static SymMatrix from_matrix_symmetrize(const Matrix& m);
};

// Vector helpers.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
Vec matvec(const Matrix& m, const Vec& v);
Vec symvec(const SymMatrix& s, const Vec& v);
double quad_form(const SymMatrix& s, const Vec& v);  // v^T S v

// Standard normal CDF via erfc.
double std_normal_cdf(double x);

// Inverse standard normal CDF. Rational approximation (max abs error
// ~1.15e-9) refined by one Halley step on the CDF; absolute error well
// below 1e-8 over (0,1). Throws std::domain_error outside (0,1).
double std_normal_quantile(double prob);

// Largest singular value via power iteration on m^T m: start vector
// (1,...,1)/sqrt(n), cap 500 iterations, stop when the Rayleigh quotient
// changes by less than 1e-12. Zero matrix returns 0.
double operator_norm(const Matrix& m);

// Lower-triangular L with L L^T = s. Pivot tolerance 1e-12 (absolute);
// failure throws FactorizationError naming the failing pivot index.
Matrix cholesky(const SymMatrix& s);

struct EigenDecomposition {
    Vec values;       // ascending
    Matrix vectors;   // columns are eigenvectors
};

// Cyclic Jacobi eigendecomposition for symmetric matrices (dim <= ~100).
EigenDecomposition jacobi_eigen(const SymMatrix& s);

double min_eigenvalue(const SymMatrix& s);

// Reassemble Q * diag(max(lambda, floor)) * Q^T. Sets clipped if any
// eigenvalue was raised.
SymMatrix clip_eigenvalues(const SymMatrix& s, double floor, bool* clipped = nullptr);

// Symmetric p-th power (p = 0.5 or -0.5 here) via Jacobi eigendecomposition.
// Eigenvalues below `floor` are clipped up before the power is applied.
Matrix sym_power(const SymMatrix& s, double exponent, double floor = 1e-12);

// Reusable N(mean, cov) sampler. Factorizes once; a covariance that is not
// positive definite falls back to eigenvalue clipping at 0 (degenerate_fallback
// set). An all-zero covariance yields the mean exactly.
class MvnSampler {
public:
    MvnSampler(Vec mean, const SymMatrix& cov);
    Vec draw(Rng& rng) const;
    bool degenerate_fallback() const { return degenerate_fallback_; }

private:
    Vec mean_;
    Matrix factor_;  // dim x dim, sample = mean + factor * z
    bool zero_cov_ = false;
    bool degenerate_fallback_ = false;
};

// One-shot convenience wrapper over MvnSampler.
Vec mvn_sample(const Vec& mean, const SymMatrix& cov, Rng& rng);

}  // namespace dpci
