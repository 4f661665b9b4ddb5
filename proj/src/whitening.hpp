#pragma once

#include "estimator.hpp"

namespace dpci {

// Sequentially built d x T whitening matrix. Column t is the projection of
// the running remainder Z onto the period-t demand gradient, capped at norm
// eta; Z starts at the identity and is depleted column by column.
struct WhiteningMatrix {
    Matrix columns;        // d x T, column t-1 is w_t
    double eta = 0.0;
    Matrix z_final;        // d x d remainder after all T updates
    double diag_iwg_opnorm = 0.0;  // ||I - W G||_op with G at the final pilot
    double diag_cube_sum = 0.0;    // sum_t ||w_t||^3
    std::size_t diag_clip_count = 0;
    std::size_t diag_zero_grad_count = 0;

    std::size_t dim() const { return columns.rows; }
    std::size_t horizon() const { return columns.cols; }
    Vec column(std::size_t t) const;  // 0-based
    double column_norm(std::size_t t) const;
};

// Algorithm: Z = I; for each period, u_t = grad of the demand mean at the
// per-period pilot, w_t = Z u_t / ||u_t||^2 (normalized to eta when
// ||w_t|| >= eta), Z -= w_t u_t^T. A vanishing gradient yields a zero column.
// Column t depends only on data before t plus (p_t, x_t): the period-t pilot
// is fit on strictly earlier data.
WhiteningMatrix whiten(const History& h, const PilotSequence& pilots, const ModelSpec& spec,
                       double eta);

struct WhiteningDiagnostics {
    double iwg_opnorm = 0.0;       // ||I - W G||_op, G rows at the final pilot
    double cube_sum = 0.0;         // sum ||w_t||^3
    double lambda_min_wdw = 0.0;   // smallest eigenvalue of W D_hat W^T
    double clip_fraction = 0.0;
    std::size_t zero_grad_count = 0;
    double z_final_opnorm = 0.0;
};

WhiteningDiagnostics whitening_diagnostics(const WhiteningMatrix& w, const History& h,
                                           const Vec& final_pilot, const ModelSpec& spec);

// W D_hat W^T with D_hat entries = variance_fn at `theta` per period.
SymMatrix whitened_covariance(const WhiteningMatrix& w, const History& h, const Vec& theta,
                              const ModelSpec& spec);

std::string whitening_to_csv(const WhiteningMatrix& w);
std::string whitening_diagnostics_to_json(const WhiteningDiagnostics& d);

}  // namespace dpci
