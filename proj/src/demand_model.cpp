#include "demand_model.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace dpci {

using nlohmann::json;

std::size_t FeatureMap::output_dim() const {
    switch (kind) {
        case FeatureKind::affine_price_context: return 1 + context_dim;
        case FeatureKind::concat: return 1 + context_dim;
        case FeatureKind::custom_table: return table_output_dim;
    }
    return 0;
}

void ModelSpec::validate() const {
    if (!(p_min < p_max)) throw ConfigError("model: p_min must be < p_max");
    if (theta0.size() != dim())
        throw ConfigError("model: theta0 length does not match feature output dim");
    for (double v : theta0)
        if (!std::isfinite(v)) throw ConfigError("model: theta0 must be finite");
    if (family.kind == Family::linear && family.noise_std < 0.0)
        throw ConfigError("model: noise_std must be >= 0");
    if (feature_map.kind == FeatureKind::custom_table && context_dim != 1)
        throw ConfigError("model: custom_table requires scalar context");
    if (feature_map.context_dim != context_dim)
        throw ConfigError("model: feature map context_dim mismatch");
}

namespace {

double interp_fraction(const Vec& knots, double v, std::size_t& lo) {
    // clamp to the knot range; non-finite lookups land on the first cell
    if (!(v > knots.front())) { lo = 0; return 0.0; }
    if (v >= knots.back()) { lo = knots.size() - 2; return 1.0; }
    std::size_t hi = std::upper_bound(knots.begin(), knots.end(), v) - knots.begin();
    lo = hi - 1;
    return (v - knots[lo]) / (knots[lo + 1] - knots[lo]);
}

}  // namespace

Vec feature(const FeatureMap& map, double p, const Vec& x) {
    if (map.kind != FeatureKind::custom_table && x.size() != map.context_dim)
        throw std::domain_error("feature: context dimension mismatch");
    switch (map.kind) {
        case FeatureKind::affine_price_context: {
            Vec out(1 + x.size());
            out[0] = map.a + map.b * p;
            std::copy(x.begin(), x.end(), out.begin() + 1);
            return out;
        }
        case FeatureKind::concat: {
            Vec out(1 + x.size());
            out[0] = p;
            std::copy(x.begin(), x.end(), out.begin() + 1);
            return out;
        }
        case FeatureKind::custom_table: {
            if (x.size() != 1)
                throw std::domain_error("feature: custom_table requires scalar context");
            std::size_t ip = 0, ix = 0;
            const double fp = interp_fraction(map.price_knots, p, ip);
            const double fx = interp_fraction(map.context_knots, x[0], ix);
            const std::size_t nx = map.context_knots.size();
            const Vec& v00 = map.table[ip * nx + ix];
            const Vec& v01 = map.table[ip * nx + ix + 1];
            const Vec& v10 = map.table[(ip + 1) * nx + ix];
            const Vec& v11 = map.table[(ip + 1) * nx + ix + 1];
            Vec out(map.table_output_dim);
            for (std::size_t k = 0; k < out.size(); ++k)
                out[k] = (1 - fp) * ((1 - fx) * v00[k] + fx * v01[k]) +
                         fp * ((1 - fx) * v10[k] + fx * v11[k]);
            return out;
        }
    }
    throw std::domain_error("feature: unknown map kind");
}

double sigmoid_clamped(double s) {
    s = std::clamp(s, -500.0, 500.0);
    if (s >= 0.0) {
        const double e = std::exp(-s);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(s);
    return e / (1.0 + e);
}

double mean_from_feature(const ModelSpec& spec, const Vec& theta, const Vec& phi) {
    const double s = dot(phi, theta);
    return spec.family.kind == Family::linear ? s : sigmoid_clamped(s);
}

double mean_demand(const ModelSpec& spec, const Vec& theta, double p, const Vec& x) {
    return mean_from_feature(spec, theta, feature(spec.feature_map, p, x));
}

Vec grad_mean_demand(const ModelSpec& spec, const Vec& theta, double p, const Vec& x) {
    Vec phi = feature(spec.feature_map, p, x);
    if (spec.family.kind == Family::linear) return phi;
    const double f = sigmoid_clamped(dot(phi, theta));
    const double w = f * (1.0 - f);
    for (double& v : phi) v *= w;
    return phi;
}

double variance_fn(const ModelSpec& spec, const Vec& theta, double p, const Vec& x) {
    if (spec.family.kind == Family::linear)
        return spec.family.noise_std * spec.family.noise_std;
    const double f = mean_demand(spec, theta, p, x);
    return f * (1.0 - f);
}

double sample_demand(const ModelSpec& spec, double p, const Vec& x, Rng& rng) {
    const double f = mean_demand(spec, spec.theta0, p, x);
    if (spec.family.kind == Family::logistic) return rng.bernoulli(f) ? 1.0 : 0.0;
    const double sd = spec.family.noise_std;
    if (sd == 0.0) return f;
    double xi = sd * rng.normal();
    if (spec.family.truncate_noise) xi = std::clamp(xi, -6.0 * sd, 6.0 * sd);
    return f + xi;
}

namespace {

void require_binary(const ModelSpec& spec, double d) {
    if (spec.family.kind == Family::logistic && d != 0.0 && d != 1.0)
        throw std::domain_error("logistic risk: demand must be 0 or 1");
}

}  // namespace

double risk(const ModelSpec& spec, const Vec& theta, double d, double p, const Vec& x) {
    require_binary(spec, d);
    const Vec phi = feature(spec.feature_map, p, x);
    const double s = dot(phi, theta);
    if (spec.family.kind == Family::linear) {
        const double r = d - s;
        return r * r;
    }
    // -d log f - (1-d) log(1-f) = log(1+e^s) - d s, computed stably
    const double sc = std::clamp(s, -500.0, 500.0);
    const double log1pe = sc > 0 ? sc + std::log1p(std::exp(-sc)) : std::log1p(std::exp(sc));
    return log1pe - d * sc;
}

Vec risk_grad(const ModelSpec& spec, const Vec& theta, double d, double p, const Vec& x) {
    require_binary(spec, d);
    Vec phi = feature(spec.feature_map, p, x);
    const double s = dot(phi, theta);
    const double w = spec.family.kind == Family::linear ? -2.0 * (d - s)
                                                        : sigmoid_clamped(s) - d;
    for (double& v : phi) v *= w;
    return phi;
}

Matrix risk_hess(const ModelSpec& spec, const Vec& theta, double d, double p, const Vec& x) {
    require_binary(spec, d);
    const Vec phi = feature(spec.feature_map, p, x);
    double w = 2.0;
    if (spec.family.kind == Family::logistic) {
        const double f = sigmoid_clamped(dot(phi, theta));
        w = f * (1.0 - f);
    }
    const std::size_t n = phi.size();
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = w * phi[i] * phi[j];
    return h;
}

namespace {

json feature_to_json(const FeatureMap& m) {
    json j;
    switch (m.kind) {
        case FeatureKind::affine_price_context:
            j["kind"] = "affine_price_context";
            j["a"] = m.a;
            j["b"] = m.b;
            break;
        case FeatureKind::concat:
            j["kind"] = "concat";
            break;
        case FeatureKind::custom_table:
            j["kind"] = "custom_table";
            j["price_knots"] = m.price_knots;
            j["context_knots"] = m.context_knots;
            j["table"] = m.table;
            j["output_dim"] = m.table_output_dim;
            break;
    }
    j["context_dim"] = m.context_dim;
    return j;
}

FeatureMap feature_from_json(const json& j) {
    FeatureMap m;
    const std::string kind = j.at("kind").get<std::string>();
    m.context_dim = j.value("context_dim", 1);
    if (kind == "affine_price_context") {
        m.kind = FeatureKind::affine_price_context;
        m.a = j.value("a", 0.9);
        m.b = j.value("b", 0.1);
    } else if (kind == "concat") {
        m.kind = FeatureKind::concat;
    } else if (kind == "custom_table") {
        m.kind = FeatureKind::custom_table;
        m.price_knots = j.at("price_knots").get<Vec>();
        m.context_knots = j.at("context_knots").get<Vec>();
        m.table = j.at("table").get<std::vector<Vec>>();
        m.table_output_dim = j.at("output_dim").get<std::size_t>();
        if (m.price_knots.size() < 2 || m.context_knots.size() < 2)
            throw ConfigError("custom_table: need at least 2 knots per axis");
        if (m.table.size() != m.price_knots.size() * m.context_knots.size())
            throw ConfigError("custom_table: table size mismatch");
    } else {
        throw ConfigError("feature map: unknown kind '" + kind + "'");
    }
    return m;
}

}  // namespace

std::string model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["family"] = spec.family.kind == Family::linear ? "linear" : "logistic";
    if (spec.family.kind == Family::linear) {
        j["noise_std"] = spec.family.noise_std;
        j["truncate_noise"] = spec.family.truncate_noise;
    }
    j["feature"] = feature_to_json(spec.feature_map);
    j["theta0"] = spec.theta0;
    j["price_range"] = {spec.p_min, spec.p_max};
    j["context_dim"] = spec.context_dim;
    return j.dump(2);
}

ModelSpec model_spec_from_json_obj(const json& j) {
    ModelSpec s;
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "linear")
        s.family.kind = Family::linear;
    else if (fam == "logistic")
        s.family.kind = Family::logistic;
    else
        throw ConfigError("model: unknown family '" + fam + "'");
    s.family.noise_std = j.value("noise_std", 0.1);
    s.family.truncate_noise = j.value("truncate_noise", false);
    s.feature_map = feature_from_json(j.at("feature"));
    s.theta0 = j.at("theta0").get<Vec>();
    const auto pr = j.at("price_range");
    s.p_min = pr.at(0).get<double>();
    s.p_max = pr.at(1).get<double>();
    s.context_dim = j.value("context_dim", s.feature_map.context_dim);
    s.validate();
    return s;
}

ModelSpec model_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model config parse error: ") + e.what());
    }
    try {
        return model_spec_from_json_obj(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model config: ") + e.what());
    }
}

}  // namespace dpci
