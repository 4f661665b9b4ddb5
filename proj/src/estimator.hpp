#pragma once

#include "pricing_env.hpp"

namespace dpci {

struct FitResult {
    Vec theta;
    double grad_norm = 0.0;
    bool converged = true;
    int iterations = 0;
};

// Ridge least squares on the first `prefix` observations: solves
// (sum phi phi^T + lambda I) theta = sum phi d with one iterative-refinement
// pass; the normal-equation residual is below 1e-10. A singular system with
// lambda = 0 raises RankDeficiencyError.
Vec fit_least_squares(const History& h, const ModelSpec& spec, std::size_t prefix,
                      double lambda);

// Damped Newton for the ridge-regularized logistic negative log-likelihood.
// Stops when the gradient norm falls below tol; step halving (up to 30) on
// objective increase; iterates escaping an l2 ball of radius 100 are projected
// back. Exhausting max_iter returns the best iterate with converged = false.
FitResult fit_logistic_newton(const History& h, const ModelSpec& spec, std::size_t prefix,
                              double lambda, const Vec& warm_start, double tol = 1e-8,
                              int max_iter = 50);

struct PilotSequence {
    std::vector<Vec> estimates;  // index t-1 holds the fit on data before period t
    Vec grad_norms;
    std::size_t fallback_count = 0;
    std::size_t nonconverged_count = 0;

    const Vec& at_period(std::size_t t) const { return estimates[t - 1]; }
    const Vec& final_estimate() const { return estimates.back(); }
};

// Sequential ERM estimates for t = 1..T+1. The first entry (no data) is the
// zero vector; each fit warm-starts from the previous one. The final fit uses
// lambda = 0, earlier fits use `lambda`. Fit failures fall back to the
// previous estimate and are counted.
PilotSequence pilot_sequence(const History& h, const ModelSpec& spec, double lambda = 1e-4);

// Internal fitting machinery shared by the public fits, the pilot sequence,
// and the policy refits inside run_episode. Features live in one contiguous
// row-major buffer; value/gradient/Hessian of the data term are accumulated
// in a single pass and carried across warm-started prefix fits.
namespace detail {

Vec ls_solve_sym(SymMatrix a, const Vec& b, double lambda);

struct FlatData {
    const double* phis = nullptr;     // row-major, n x dim
    const double* demands = nullptr;  // length n
    std::size_t n = 0;
    std::size_t dim = 0;
};

// Data-term (no ridge) value/gradient/Hessian at `theta` over the first
// `rows` rows. Extending the row range at the same theta is exact and O(new
// rows); changing theta recomputes from scratch.
struct LogisticEval {
    Vec theta;
    double value = 0.0;
    Vec grad;
    SymMatrix hess;
    std::size_t rows = 0;

    void reset(const Vec& new_theta);
    void extend(const FlatData& data, std::size_t upto);
};

// Warm-started damped Newton; `cache` enters holding an evaluation at the
// warm start over at most data.n rows and leaves holding one at the returned
// iterate over exactly data.n rows.
FitResult logistic_newton(const FlatData& data, double lambda, LogisticEval& cache,
                          double tol, int max_iter);
FitResult logistic_newton(const FlatData& data, double lambda, Vec warm_start, double tol,
                          int max_iter);

std::vector<double> feature_matrix_flat(const History& h, const ModelSpec& spec);

}  // namespace detail

}  // namespace dpci
