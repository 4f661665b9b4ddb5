#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dpci {

using nlohmann::json;

// defined in demand_model.cpp
ModelSpec model_spec_from_json_obj(const json& j);

double ExperimentConfig::eta() const {
    return std::pow(static_cast<double>(horizon), -upsilon);
}

void ExperimentConfig::validate() const {
    model.validate();
    if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
    if (n_trials < 1) throw ConfigError("config: n_trials must be >= 1");
    if (alphas.empty()) throw ConfigError("config: alphas must be nonempty");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("config: alphas must lie in (0,1)");
    if (!(upsilon > 0.5 && upsilon < 1.0))
        throw ConfigError("config: upsilon must lie in (1/2, 1)");
    if (policy.kind == PolicyKind::epsilon_greedy &&
        !(policy.epsilon > 0.0 && policy.epsilon < 1.0))
        throw ConfigError("config: epsilon must lie in (0,1)");
    if (policy.price_grid_size < 2) throw ConfigError("config: price grid too small");
    if (context.dim != model.context_dim)
        throw ConfigError("config: context process dim must match the model");
    for (const auto& [p, x] : queries) {
        if (p < model.p_min || p > model.p_max)
            throw ConfigError("config: query price out of range");
        if (x.size() != model.context_dim)
            throw ConfigError("config: query context dim mismatch");
    }
    if (mc_samples < 100) throw ConfigError("config: M must be >= 100");
    if (pilot_ridge < 0.0) throw ConfigError("config: pilot_ridge must be >= 0");
}

namespace {

ModelSpec paper_model() {
    ModelSpec m;
    m.family.kind = Family::logistic;
    m.feature_map.kind = FeatureKind::affine_price_context;
    m.feature_map.a = 0.9;
    m.feature_map.b = 0.1;
    m.feature_map.context_dim = 1;
    m.theta0 = {-1.0, 1.0};
    m.p_min = 0.0;
    m.p_max = 1.0;
    m.context_dim = 1;
    return m;
}

std::vector<std::pair<double, Vec>> paper_queries() {
    return {{0.5, Vec{0.0}}, {0.5, Vec{1.0}}, {1.0, Vec{1.0}}};
}

}  // namespace

ExperimentConfig builtin_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.model = paper_model();
    cfg.queries = paper_queries();
    cfg.context.kind = ContextKind::demand_driven_walk;
    cfg.context.dim = 1;
    cfg.context.clip_bound = 1.0;

    if (name == "desk_logistic") {
        cfg.policy.kind = PolicyKind::epsilon_greedy;
        cfg.policy.epsilon = 0.05;
        cfg.horizon = 2000;
        cfg.n_trials = 1000;
    } else if (name == "desk_logistic_ucb") {
        cfg.policy.kind = PolicyKind::ucb;
        cfg.horizon = 2000;
        cfg.n_trials = 1000;
    } else if (name == "paper_logistic") {
        cfg.policy.kind = PolicyKind::ucb;
        cfg.horizon = 10000;
        cfg.n_trials = 5000;
    } else if (name == "desk_linear") {
        cfg.model.family.kind = Family::linear;
        cfg.model.family.noise_std = 0.1;
        cfg.policy.kind = PolicyKind::epsilon_greedy;
        cfg.policy.epsilon = 0.05;
        cfg.horizon = 2000;
        cfg.n_trials = 1000;
    } else {
        throw ConfigError("unknown built-in config '" + name + "'");
    }
    cfg.validate();
    return cfg;
}

std::vector<std::string> builtin_config_names() {
    return {"desk_logistic", "desk_logistic_ucb", "desk_linear", "paper_logistic"};
}

namespace {

json policy_to_json(const Policy& p) {
    json j;
    switch (p.kind) {
        case PolicyKind::epsilon_greedy: j["kind"] = "epsilon_greedy"; break;
        case PolicyKind::ucb: j["kind"] = "ucb"; break;
        case PolicyKind::fixed_random: j["kind"] = "fixed_random"; break;
    }
    j["epsilon"] = p.epsilon;
    j["ucb_scale"] = p.ucb_scale;
    j["ucb_lambda"] = p.ucb_lambda;
    j["ucb_literal_max"] = p.ucb_literal_max;
    j["price_grid_size"] = p.price_grid_size;
    j["fit_ridge"] = p.fit_ridge;
    j["refit_thin"] = p.refit_thin;
    return j;
}

Policy policy_from_json(const json& j) {
    Policy p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "epsilon_greedy")
        p.kind = PolicyKind::epsilon_greedy;
    else if (kind == "ucb")
        p.kind = PolicyKind::ucb;
    else if (kind == "fixed_random")
        p.kind = PolicyKind::fixed_random;
    else
        throw ConfigError("policy: unknown kind '" + kind + "'");
    p.epsilon = j.value("epsilon", 0.05);
    p.ucb_scale = j.value("ucb_scale", 1.0);
    p.ucb_lambda = j.value("ucb_lambda", 1.0);
    p.ucb_literal_max = j.value("ucb_literal_max", false);
    p.price_grid_size = j.value("price_grid_size", std::size_t{201});
    p.fit_ridge = j.value("fit_ridge", 1e-4);
    p.refit_thin = j.value("refit_thin", false);
    return p;
}

json context_to_json(const ContextProcess& c) {
    json j;
    switch (c.kind) {
        case ContextKind::demand_driven_walk: j["kind"] = "demand_driven_walk"; break;
        case ContextKind::demand_driven_walk_unbounded:
            j["kind"] = "demand_driven_walk_unbounded";
            break;
        case ContextKind::iid_uniform: j["kind"] = "iid_uniform"; break;
    }
    j["dim"] = c.dim;
    j["clip_bound"] = c.clip_bound;
    return j;
}

ContextProcess context_from_json(const json& j) {
    ContextProcess c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "demand_driven_walk_unbounded")
        c.kind = ContextKind::demand_driven_walk_unbounded;
    else if (kind == "demand_driven_walk")
        c.kind = ContextKind::demand_driven_walk;
    else if (kind == "iid_uniform")
        c.kind = ContextKind::iid_uniform;
    else
        throw ConfigError("context: unknown kind '" + kind + "'");
    c.dim = j.value("dim", std::size_t{1});
    c.clip_bound = j.value("clip_bound", 1.0);
    return c;
}

}  // namespace

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["name"] = cfg.name;
    j["model"] = json::parse(model_spec_to_json(cfg.model));
    j["policy"] = policy_to_json(cfg.policy);
    j["context"] = context_to_json(cfg.context);
    j["horizon"] = cfg.horizon;
    j["n_trials"] = cfg.n_trials;
    j["alphas"] = cfg.alphas;
    json queries = json::array();
    for (const auto& [p, x] : cfg.queries) queries.push_back({{"p", p}, {"x", x}});
    j["queries"] = queries;
    j["uniform_grid"] = {{"price_points", cfg.grid.price_points},
                         {"context_points", cfg.grid.context_points},
                         {"context_range", {cfg.grid.context_lo, cfg.grid.context_hi}}};
    j["mc_samples"] = cfg.mc_samples;
    j["upsilon"] = cfg.upsilon;
    j["eta"] = cfg.eta();
    j["pilot_ridge"] = cfg.pilot_ridge;
    j["base_seed"] = cfg.base_seed;
    j["workers"] = cfg.workers;
    j["compute_uniform"] = cfg.compute_uniform;
    return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.name = j.value("name", "custom");
        cfg.model = model_spec_from_json_obj(j.at("model"));
        cfg.policy = policy_from_json(j.at("policy"));
        cfg.context = context_from_json(j.at("context"));
        cfg.horizon = j.at("horizon").get<std::size_t>();
        cfg.n_trials = j.value("n_trials", std::size_t{1});
        cfg.alphas = j.value("alphas", Vec{0.3, 0.2, 0.1, 0.05});
        cfg.queries.clear();
        if (j.contains("queries"))
            for (const auto& q : j.at("queries"))
                cfg.queries.emplace_back(q.at("p").get<double>(), q.at("x").get<Vec>());
        if (j.contains("uniform_grid")) {
            const auto& g = j.at("uniform_grid");
            cfg.grid.price_points = g.value("price_points", std::size_t{51});
            cfg.grid.context_points = g.value("context_points", std::size_t{101});
            if (g.contains("context_range")) {
                cfg.grid.context_lo = g.at("context_range").at(0).get<double>();
                cfg.grid.context_hi = g.at("context_range").at(1).get<double>();
            }
        }
        cfg.mc_samples = j.value("mc_samples", std::size_t{2000});
        cfg.upsilon = j.value("upsilon", 0.6);
        cfg.pilot_ridge = j.value("pilot_ridge", 1e-4);
        cfg.base_seed = j.value("base_seed", std::uint64_t{20240601});
        cfg.workers = j.value("workers", std::size_t{0});
        cfg.compute_uniform = j.value("compute_uniform", true);
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path_or_name) {
    std::error_code ec;
    if (std::filesystem::exists(path_or_name, ec)) {
        std::ifstream in(path_or_name);
        if (!in) throw ConfigError("cannot open config file '" + path_or_name + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return experiment_config_from_json(ss.str());
    }
    for (const std::string& n : builtin_config_names())
        if (n == path_or_name) return builtin_config(n);
    throw ConfigError("config '" + path_or_name +
                      "' is neither an existing file nor a built-in name");
}

}  // namespace dpci
