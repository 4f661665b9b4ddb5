#include "whitening.hpp"

#include <cassert>
#include <charconv>
#include <cmath>

#include <json.hpp>

namespace dpci {

Vec WhiteningMatrix::column(std::size_t t) const {
    Vec w(dim());
    for (std::size_t i = 0; i < dim(); ++i) w[i] = columns(i, t);
    return w;
}

double WhiteningMatrix::column_norm(std::size_t t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += columns(i, t) * columns(i, t);
    return std::sqrt(s);
}

namespace {

double frobenius_sq(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return s;
}

// I - W G assembled from stored columns and gradients at `theta`.
Matrix identity_minus_wg(const WhiteningMatrix& w, const History& h, const Vec& theta,
                         const ModelSpec& spec) {
    const std::size_t d = w.dim();
    Matrix m = Matrix::identity(d);
    for (std::size_t t = 0; t < w.horizon(); ++t) {
        const Vec g = grad_mean_demand(spec, theta, h.prices[t], h.contexts[t]);
        for (std::size_t i = 0; i < d; ++i) {
            const double wi = w.columns(i, t);
            if (wi == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) m(i, j) -= wi * g[j];
        }
    }
    return m;
}

}  // namespace

WhiteningMatrix whiten(const History& h, const PilotSequence& pilots, const ModelSpec& spec,
                       double eta) {
    if (eta <= 0.0) throw std::invalid_argument("whiten: eta must be positive");
    const std::size_t horizon = h.size();
    if (pilots.estimates.size() != horizon + 1)
        throw std::invalid_argument("whiten: pilot sequence must have length T+1");
    const std::size_t d = spec.dim();

    WhiteningMatrix out;
    out.eta = eta;
    out.columns = Matrix(d, horizon);

    Matrix z = Matrix::identity(d);
    Vec w(d);
#ifndef NDEBUG
    double prev_frob = frobenius_sq(z);
#endif
    for (std::size_t t = 1; t <= horizon; ++t) {
        const Vec u = grad_mean_demand(spec, pilots.at_period(t), h.prices[t - 1],
                                       h.contexts[t - 1]);
        const double u_sq = dot(u, u);
        if (u_sq == 0.0) {
            ++out.diag_zero_grad_count;
            continue;  // column stays zero, Z unchanged
        }
        double w_sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += z(i, j) * u[j];
            w[i] = s / u_sq;
            w_sq += w[i] * w[i];
        }
        const double w_norm = std::sqrt(w_sq);
        if (w_norm >= eta) {
            const double scale = eta / w_norm;
            for (double& v : w) v *= scale;
            ++out.diag_clip_count;
        }
        for (std::size_t i = 0; i < d; ++i) {
            out.columns(i, t - 1) = w[i];
            for (std::size_t j = 0; j < d; ++j) z(i, j) -= w[i] * u[j];
        }
        out.diag_cube_sum += std::pow(std::min(w_norm, eta), 3);
#ifndef NDEBUG
        const double frob = frobenius_sq(z);
        assert(!(frob > prev_frob + 1e-12));
        prev_frob = frob;
#endif
    }
    out.z_final = std::move(z);
    out.diag_iwg_opnorm =
        operator_norm(identity_minus_wg(out, h, pilots.final_estimate(), spec));
    return out;
}

SymMatrix whitened_covariance(const WhiteningMatrix& w, const History& h, const Vec& theta,
                              const ModelSpec& spec) {
    const std::size_t d = w.dim();
    SymMatrix cov(d);
    Vec col(d);
    for (std::size_t t = 0; t < w.horizon(); ++t) {
        for (std::size_t i = 0; i < d; ++i) col[i] = w.columns(i, t);
        const double var = variance_fn(spec, theta, h.prices[t], h.contexts[t]);
        cov.add_outer(col, var);
    }
    return cov;
}

WhiteningDiagnostics whitening_diagnostics(const WhiteningMatrix& w, const History& h,
                                           const Vec& final_pilot, const ModelSpec& spec) {
    WhiteningDiagnostics d;
    d.iwg_opnorm = operator_norm(identity_minus_wg(w, h, final_pilot, spec));
    double cube = 0.0;
    std::size_t clipped = 0;
    for (std::size_t t = 0; t < w.horizon(); ++t) {
        const double n = w.column_norm(t);
        cube += n * n * n;
        if (n >= w.eta - 1e-15) ++clipped;
    }
    d.cube_sum = cube;
    d.clip_fraction = w.horizon() ? static_cast<double>(w.diag_clip_count) /
                                        static_cast<double>(w.horizon())
                                  : 0.0;
    (void)clipped;
    d.zero_grad_count = w.diag_zero_grad_count;
    d.lambda_min_wdw = min_eigenvalue(whitened_covariance(w, h, final_pilot, spec));
    d.z_final_opnorm = operator_norm(w.z_final);
    return d;
}

std::string whitening_to_csv(const WhiteningMatrix& w) {
    std::string out = "t";
    for (std::size_t i = 1; i <= w.dim(); ++i) out += ",w" + std::to_string(i);
    out += ",norm\n";
    char buf[32];
    auto put = [&](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, res.ptr);
    };
    for (std::size_t t = 0; t < w.horizon(); ++t) {
        out += std::to_string(t + 1);
        for (std::size_t i = 0; i < w.dim(); ++i) {
            out += ',';
            put(w.columns(i, t));
        }
        out += ',';
        put(w.column_norm(t));
        out += '\n';
    }
    return out;
}

std::string whitening_diagnostics_to_json(const WhiteningDiagnostics& d) {
    nlohmann::json j;
    j["iwg_opnorm"] = d.iwg_opnorm;
    j["cube_sum"] = d.cube_sum;
    j["lambda_min_wdw"] = d.lambda_min_wdw;
    j["clip_fraction"] = d.clip_fraction;
    j["zero_grad_count"] = d.zero_grad_count;
    j["z_final_opnorm"] = d.z_final_opnorm;
    return j.dump(2);
}

}  // namespace dpci
