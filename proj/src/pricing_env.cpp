#include "pricing_env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "estimator.hpp"

namespace dpci {

Vec ContextProcess::current_context() const {
    Vec x(dim, 0.0);
    if (clip_bound <= 0.0) return x;  // degenerate bound pins the context at 0
    for (std::size_t i = 0; i < dim; ++i) {
        const double z = state[i];
        x[i] = clip_bound * z / std::max(clip_bound, std::abs(z));
    }
    return x;
}

Vec next_context(ContextProcess& proc, double p, double d, double f_true, Rng& rng) {
    (void)p;
    if (proc.state.size() != proc.dim) proc.reset();
    if (proc.kind == ContextKind::iid_uniform) {
        Vec x(proc.dim);
        for (std::size_t i = 0; i < proc.dim; ++i)
            x[i] = rng.uniform_range(-proc.clip_bound, proc.clip_bound);
        return x;
    }
    const double shock = d - f_true;
    for (double& z : proc.state) z += shock;
    if (proc.kind == ContextKind::demand_driven_walk) proc.state = proc.current_context();
    return proc.current_context();
}

void History::validate(const ModelSpec& spec) const {
    if (contexts.size() != prices.size() || demands.size() != prices.size())
        throw std::domain_error("history: column lengths differ");
    for (std::size_t t = 0; t < size(); ++t) {
        if (prices[t] < spec.p_min - 1e-12 || prices[t] > spec.p_max + 1e-12)
            throw std::domain_error("history: price out of range at t=" + std::to_string(t + 1));
        if (contexts[t].size() != spec.context_dim)
            throw std::domain_error("history: context dim mismatch at t=" + std::to_string(t + 1));
        if (spec.family.kind == Family::logistic && demands[t] != 0.0 && demands[t] != 1.0)
            throw std::domain_error("history: non-binary demand at t=" + std::to_string(t + 1));
    }
}

namespace {

double grid_price(const ModelSpec& spec, std::size_t i, std::size_t n) {
    if (n == 1) return spec.p_min;
    return spec.p_min + (spec.p_max - spec.p_min) * static_cast<double>(i) /
                            static_cast<double>(n - 1);
}

}  // namespace

double epsilon_greedy_price(const Vec& theta_hat, const Vec& x, const ModelSpec& spec,
                            double epsilon, std::size_t grid_size, Rng& rng) {
    if (rng.bernoulli(epsilon)) return rng.uniform_range(spec.p_min, spec.p_max);
    double best_p = spec.p_min;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double p = grid_price(spec, i, grid_size);
        const double v = p * mean_demand(spec, theta_hat, p, x);
        if (v > best_v) {
            best_v = v;
            best_p = p;
        }
    }
    return best_p;
}

double ucb_price(const Vec& theta_hat, const SymMatrix& v_matrix, std::size_t t,
                 const Vec& x, const ModelSpec& spec, const Policy& policy) {
    const Matrix l = cholesky(v_matrix);
    const std::size_t dim = v_matrix.dim;
    const double bonus_scale =
        policy.ucb_scale * std::sqrt(std::log(static_cast<double>(t) + 1.0));
    double best_p = spec.p_min;
    double best_v = -std::numeric_limits<double>::infinity();
    Vec y(dim);
    for (std::size_t i = 0; i < policy.price_grid_size; ++i) {
        const double p = grid_price(spec, i, policy.price_grid_size);
        const Vec phi = feature(spec.feature_map, p, x);
        // ||phi||_{V^-1} via forward substitution: solve L y = phi
        for (std::size_t r = 0; r < dim; ++r) {
            double s = phi[r];
            for (std::size_t k = 0; k < r; ++k) s -= l(r, k) * y[k];
            y[r] = s / l(r, r);
        }
        double optimistic = mean_from_feature(spec, theta_hat, phi) + bonus_scale * norm2(y);
        if (policy.ucb_literal_max)
            optimistic = std::max(1.0, optimistic);
        else if (spec.family.kind == Family::logistic)
            optimistic = std::min(1.0, optimistic);
        const double v = p * optimistic;
        if (v > best_v) {
            best_v = v;
            best_p = p;
        }
    }
    return best_p;
}

History run_episode(const ModelSpec& spec, const Policy& policy, ContextProcess proc,
                    std::size_t horizon, std::uint64_t seed, EpisodeDiagnostics* diag) {
    spec.validate();
    if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
    if (proc.dim != spec.context_dim)
        throw ConfigError("run_episode: context process dim does not match model");

    Rng rng(Rng::mix(seed, 0x455049534f444531ULL));
    proc.reset();

    const std::size_t dim = spec.dim();
    History h;
    h.model_dim = dim;
    h.prices.reserve(horizon);
    h.contexts.reserve(horizon);
    h.demands.reserve(horizon);

    Vec theta_hat(dim, 0.0);
    SymMatrix v_matrix = SymMatrix::identity(dim);
    for (double& v : v_matrix.data) v *= policy.ucb_lambda;

    // running fit state
    std::vector<double> phi_flat;
    phi_flat.reserve(horizon * dim);
    SymMatrix ls_a(dim);
    Vec ls_b(dim, 0.0);
    detail::LogisticEval fit_cache;
    fit_cache.reset(theta_hat);
    EpisodeDiagnostics local;

    Vec x = proc.kind == ContextKind::iid_uniform
                ? next_context(proc, 0.0, 0.0, 0.0, rng)
                : proc.current_context();

    for (std::size_t t = 1; t <= horizon; ++t) {
        const std::size_t n = t - 1;
        const bool refit_due =
            policy.kind != PolicyKind::fixed_random && n > 0 &&
            (!policy.refit_thin || t <= 200 || t % 10 == 0);
        if (refit_due) {
            try {
                if (spec.family.kind == Family::linear) {
                    theta_hat = detail::ls_solve_sym(ls_a, ls_b, policy.fit_ridge);
                } else {
                    detail::FlatData data{phi_flat.data(), h.demands.data(), n, dim};
                    FitResult fit =
                        detail::logistic_newton(data, policy.fit_ridge, fit_cache, 1e-8, 50);
                    theta_hat = std::move(fit.theta);
                }
                ++local.refits;
            } catch (const NumericError&) {
                ++local.fit_fallbacks;  // keep the previous estimate
                fit_cache.reset(theta_hat);
            }
        }

        double p;
        switch (policy.kind) {
            case PolicyKind::epsilon_greedy:
                p = epsilon_greedy_price(theta_hat, x, spec, policy.epsilon,
                                         policy.price_grid_size, rng);
                break;
            case PolicyKind::ucb:
                p = ucb_price(theta_hat, v_matrix, t, x, spec, policy);
                break;
            case PolicyKind::fixed_random:
            default:
                p = rng.uniform_range(spec.p_min, spec.p_max);
                break;
        }

        const double f_true = mean_demand(spec, spec.theta0, p, x);
        const double d = sample_demand(spec, p, x, rng);

        h.prices.push_back(p);
        h.contexts.push_back(x);
        h.demands.push_back(d);

        const Vec phi = feature(spec.feature_map, p, x);
        v_matrix.add_outer(phi, 1.0);
        ls_a.add_outer(phi, 1.0);
        for (std::size_t k = 0; k < dim; ++k) ls_b[k] += phi[k] * d;
        phi_flat.insert(phi_flat.end(), phi.begin(), phi.end());

        x = next_context(proc, p, d, f_true, rng);
    }
    if (diag) *diag = local;
    return h;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string history_to_csv(const History& h) {
    const std::size_t k = h.contexts.empty() ? 0 : h.contexts.front().size();
    std::string out = "t,p";
    for (std::size_t i = 1; i <= k; ++i) out += ",x" + std::to_string(i);
    out += ",d\n";
    for (std::size_t t = 0; t < h.size(); ++t) {
        out += std::to_string(t + 1);
        out += ',';
        append_double(out, h.prices[t]);
        for (std::size_t i = 0; i < k; ++i) {
            out += ',';
            append_double(out, h.contexts[t][i]);
        }
        out += ',';
        append_double(out, h.demands[t]);
        out += '\n';
    }
    return out;
}

History history_from_csv(const std::string& text) {
    History h;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    std::size_t k = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            // header is t,p,x1..xk,d: k context columns plus three fixed ones
            const auto commas =
                static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
            if (commas < 2) throw IoError("history csv: malformed header '" + line + "'");
            k = commas - 2;
            continue;
        }
        std::vector<double> vals;
        const char* ptr = line.data();
        const char* end = line.data() + line.size();
        while (ptr < end) {
            double v;
            auto res = std::from_chars(ptr, end, v);
            if (res.ec != std::errc())
                throw IoError("history csv: bad number in line '" + line + "'");
            vals.push_back(v);
            ptr = res.ptr;
            if (ptr < end && *ptr == ',') ++ptr;
        }
        if (vals.size() != k + 3)
            throw IoError("history csv: wrong column count in line '" + line + "'");
        h.prices.push_back(vals[1]);
        h.contexts.emplace_back(vals.begin() + 2, vals.begin() + 2 + k);
        h.demands.push_back(vals[k + 2]);
    }
    if (!header_seen) throw IoError("history csv: missing header");
    return h;
}

void history_write_binary(const History& h, std::ostream& os) {
    const char magic[4] = {'D', 'P', 'H', '1'};
    os.write(magic, 4);
    const std::uint64_t n = h.size();
    const std::uint32_t k = static_cast<std::uint32_t>(
        h.contexts.empty() ? 0 : h.contexts.front().size());
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    os.write(reinterpret_cast<const char*>(&k), sizeof(k));
    os.write(reinterpret_cast<const char*>(h.prices.data()), n * sizeof(double));
    os.write(reinterpret_cast<const char*>(h.demands.data()), n * sizeof(double));
    for (const Vec& x : h.contexts)
        os.write(reinterpret_cast<const char*>(x.data()), k * sizeof(double));
}

History history_read_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "DPH1", 4) != 0)
        throw IoError("history binary: bad magic");
    std::uint64_t n = 0;
    std::uint32_t k = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    is.read(reinterpret_cast<char*>(&k), sizeof(k));
    History h;
    h.prices.resize(n);
    h.demands.resize(n);
    is.read(reinterpret_cast<char*>(h.prices.data()), n * sizeof(double));
    is.read(reinterpret_cast<char*>(h.demands.data()), n * sizeof(double));
    h.contexts.assign(n, Vec(k, 0.0));
    for (Vec& x : h.contexts) is.read(reinterpret_cast<char*>(x.data()), k * sizeof(double));
    if (!is) throw IoError("history binary: truncated stream");
    return h;
}

}  // namespace dpci
