#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pricing_env.hpp"

namespace dpci {

struct UniformGridSpec {
    std::size_t price_points = 51;
    std::size_t context_points = 101;
    double context_lo = -1.0;
    double context_hi = 1.0;
};

struct ExperimentConfig {
    std::string name = "custom";
    ModelSpec model;
    Policy policy;
    ContextProcess context;
    std::size_t horizon = 2000;
    std::size_t n_trials = 1000;
    Vec alphas = {0.3, 0.2, 0.1, 0.05};
    std::vector<std::pair<double, Vec>> queries;
    UniformGridSpec grid;
    std::size_t mc_samples = 2000;           // M
    double upsilon = 0.6;                    // eta = T^-upsilon
    double pilot_ridge = 1e-4;
    std::uint64_t base_seed = 20240601;
    std::size_t workers = 0;                 // 0 -> hardware concurrency
    bool compute_uniform = true;

    double eta() const;
    void validate() const;  // throws ConfigError
};

// Built-in named configurations ("desk_logistic", "desk_logistic_ucb",
// "desk_linear", "paper_logistic").
ExperimentConfig builtin_config(const std::string& name);
std::vector<std::string> builtin_config_names();

std::string experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const std::string& text);

// Resolves a --config value: an existing file path is parsed, otherwise the
// value must name a built-in configuration.
ExperimentConfig load_config(const std::string& path_or_name);

}  // namespace dpci
