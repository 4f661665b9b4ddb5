#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"

namespace dpci {

enum class FeatureKind { affine_price_context, concat, custom_table };
enum class Family { linear, logistic };

// Feature map phi(p, x) -> R^d.
//   affine_price_context: (a + b*p, x_1, ..., x_k)
//   concat:               (p, x_1, ..., x_k)
//   custom_table:         bilinear interpolation on a (price, scalar-context)
//                         grid of d-vectors
struct FeatureMap {
    FeatureKind kind = FeatureKind::affine_price_context;
    double a = 0.9;
    double b = 0.1;
    std::size_t context_dim = 1;
    // custom_table data (context_dim must be 1)
    Vec price_knots;
    Vec context_knots;
    std::vector<Vec> table;  // [price_knots.size() * context_knots.size()] d-vectors
    std::size_t table_output_dim = 0;

    std::size_t output_dim() const;
};

struct DemandFamily {
    Family kind = Family::logistic;
    double noise_std = 0.1;          // linear only
    bool truncate_noise = false;     // clamp linear noise at +-6 sigma
};

struct ModelSpec {
    DemandFamily family;
    FeatureMap feature_map;
    Vec theta0;
    double p_min = 0.0;
    double p_max = 1.0;
    std::size_t context_dim = 1;

    std::size_t dim() const { return feature_map.output_dim(); }
    void validate() const;  // throws ConfigError
};

Vec feature(const FeatureMap& map, double p, const Vec& x);

double mean_demand(const ModelSpec& spec, const Vec& theta, double p, const Vec& x);
Vec grad_mean_demand(const ModelSpec& spec, const Vec& theta, double p, const Vec& x);
// Conditional demand variance: linear -> noise_std^2, logistic -> f(1-f).
double variance_fn(const ModelSpec& spec, const Vec& theta, double p, const Vec& x);
double sample_demand(const ModelSpec& spec, double p, const Vec& x, Rng& rng);

// Per-observation risk: least squares for linear, negative log-likelihood
// for logistic (d must be 0/1).
double risk(const ModelSpec& spec, const Vec& theta, double d, double p, const Vec& x);
Vec risk_grad(const ModelSpec& spec, const Vec& theta, double d, double p, const Vec& x);
Matrix risk_hess(const ModelSpec& spec, const Vec& theta, double d, double p, const Vec& x);

// Versions taking a precomputed feature vector; used in the fitting loops.
double mean_from_feature(const ModelSpec& spec, const Vec& theta, const Vec& phi);
double sigmoid_clamped(double s);

std::string model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const std::string& text);

}  // namespace dpci
