#pragma once

#include "whitening.hpp"

namespace dpci {

// Debiased estimate theta_d = theta_p + W (d - f_hat), with the plug-in
// variance diagonal D_hat and the d x d covariance W D_hat W^T.
struct DebiasedEstimate {
    Vec theta_d;
    Vec theta_p;
    const WhiteningMatrix* whitening = nullptr;
    Vec d_hat;             // per-period plug-in variances (length T)
    SymMatrix cov_hat;     // W D_hat W^T
    bool cov_clipped = false;  // eigenvalues raised to the 1e-12 floor
};

enum class BandKind { pointwise, uniform, wald_pointwise, wald_uniform };

struct ConfidenceBand {
    BandKind kind = BandKind::pointwise;
    double alpha = 0.1;
    double lower = 0.0;    // pointwise bounds
    double upper = 0.0;
    double center = 0.0;
    double half_width = 0.0;   // pointwise: z * sigma; uniform: s_alpha
    Vec center_theta;          // parameter that generates the center curve
    // uniform band metadata
    std::size_t grid_prices = 0;
    std::size_t grid_contexts = 0;
    std::size_t mc_samples = 0;
};

struct UniformGrid {
    Vec prices;
    std::vector<Vec> contexts;
};

UniformGrid make_uniform_grid(const ModelSpec& spec, std::size_t n_prices,
                              std::size_t n_contexts, double ctx_lo, double ctx_hi);

DebiasedEstimate debias(const Vec& theta_p, const WhiteningMatrix& w, const History& h,
                        const ModelSpec& spec);

// f(p,x;theta_d) +- z_{alpha/2} * sqrt(g^T cov_hat g), g at theta_p.
ConfidenceBand pointwise_ci(const DebiasedEstimate& est, double p, const Vec& x,
                            double alpha, const ModelSpec& spec);

// Monte-Carlo uniform band per the max-|<grad, zeta>| statistic: zeta_m drawn
// from N(0, cov_hat), s_alpha the upper empirical (1-alpha)-quantile of the
// grid maxima.
ConfidenceBand uniform_ci(const DebiasedEstimate& est, double alpha, std::size_t m_samples,
                          const UniformGrid& grid, const ModelSpec& spec, Rng& rng);

// Classical Wald machinery: MLE (lambda = 0) plus the sample information
// matrix; invalid under adaptive collection, kept as the baseline.
struct WaldFit {
    Vec theta;
    SymMatrix information;      // I_T(theta)
    SymMatrix information_inv;  // I_T(theta)^-1
};

WaldFit wald_fit(const History& h, const ModelSpec& spec);

ConfidenceBand wald_ci(const WaldFit& fit, double p, const Vec& x, double alpha,
                       const ModelSpec& spec);
ConfidenceBand wald_ci(const History& h, const ModelSpec& spec, double p, const Vec& x,
                       double alpha);

// Generic Gaussian-parameter uniform band builder shared by the debiased and
// Wald constructions: center curve from center_theta, gradients at grad_theta,
// zeta ~ N(0, cov). Returns the per-sample grid maxima (a-sample) so multiple
// alpha levels reuse one Monte-Carlo pass.
Vec uniform_max_sample(const Vec& grad_theta, const SymMatrix& cov,
                       const UniformGrid& grid, const ModelSpec& spec, std::size_t m_samples,
                       Rng& rng, bool* degenerate = nullptr);

// Upper empirical quantile: ascending order statistic at ceil(q * n) (1-based).
double empirical_quantile(Vec values, double q);

// Standardized errors against the known truth (simulation only):
//   estimation: C^{-1/2} (theta_hat - theta0) where C is the method covariance
//   prediction: [f(q;theta_hat) - f(q;theta0)] / sigma_hat(q)
struct NormalizedErrors {
    Vec estimation;              // d standardized coordinates
    Vec prediction;              // one per query
};

NormalizedErrors normalized_errors_debiased(const DebiasedEstimate& est, const History& h,
                                            const ModelSpec& spec,
                                            const std::vector<std::pair<double, Vec>>& queries);
NormalizedErrors normalized_errors_wald(const WaldFit& fit, const ModelSpec& spec,
                                        const std::vector<std::pair<double, Vec>>& queries);

std::string band_to_json(const ConfidenceBand& band);

}  // namespace dpci
