#pragma once

// Independent reference implementations used only to check the library.
// Nothing here may call into the code paths under test.

#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

// Normal CDF from the erf Taylor series (all-positive form), good to ~1e-15
// for |x| <= 6.
double normal_cdf_series(double x);

// Quantile by bisection on normal_cdf_series, |error| < 1e-12.
double normal_quantile_bisect(double p);

// Largest singular value via one-sided Jacobi orthogonalization of the
// columns of a row-major rows x cols matrix.
double svd_opnorm(const std::vector<double>& a, std::size_t rows, std::size_t cols);

// Least squares min ||A x - b||_2 via Householder QR (A row-major, full
// column rank).
Vec qr_solve(const std::vector<double>& a, std::size_t rows, std::size_t cols, const Vec& b);

// Ridge logistic regression by plain gradient descent on the mean objective;
// runs up to max_steps of size `step`, stopping when the mean-gradient norm
// drops below 1e-12.
Vec logistic_gd(const std::vector<double>& phis, const Vec& demands, std::size_t n,
                std::size_t dim, double lambda_total, std::size_t max_steps, double step);

// Central finite-difference gradient of f at x.
Vec fd_gradient(const std::function<double(const Vec&)>& f, Vec x, double h);

// argmax of f over a dense uniform grid of n_points on [lo, hi].
double dense_grid_argmax(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t n_points);

}  // namespace oracle
