#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "demand_model.hpp"

namespace dpci {

enum class ContextKind { demand_driven_walk, demand_driven_walk_unbounded, iid_uniform };

// Context generation process. demand_driven_walk keeps the clipped value as
// its state: x' = (x + shock)/max(1, |x + shock|) with shock = d - f, so the
// context diffuses inside [-clip_bound, clip_bound]. The unbounded variant
// accumulates the raw shocks and only clips on emission, which makes the
// context stick to one boundary for long stretches. iid_uniform redraws
// uniformly each period.
struct ContextProcess {
    ContextKind kind = ContextKind::demand_driven_walk;
    std::size_t dim = 1;
    double clip_bound = 1.0;
    Vec state;  // z, initialized to 0

    void reset() { state.assign(dim, 0.0); }
    Vec current_context() const;
};

Vec next_context(ContextProcess& proc, double p, double d, double f_true, Rng& rng);

enum class PolicyKind { epsilon_greedy, ucb, fixed_random };

struct Policy {
    PolicyKind kind = PolicyKind::epsilon_greedy;
    double epsilon = 0.05;
    double ucb_scale = 1.0;      // c in the elliptical bonus
    double ucb_lambda = 1.0;     // ridge in V_t
    bool ucb_literal_max = false;  // use the literal max{1, f+CI} objective
    std::size_t price_grid_size = 201;
    double fit_ridge = 1e-4;     // ridge for the policy's running ERM
    bool refit_thin = false;     // refit every 10 periods after t=200
};

struct History {
    Vec prices;
    std::vector<Vec> contexts;
    Vec demands;
    std::size_t model_dim = 0;

    std::size_t size() const { return prices.size(); }
    void validate(const ModelSpec& spec) const;  // throws std::domain_error
};

double epsilon_greedy_price(const Vec& theta_hat, const Vec& x, const ModelSpec& spec,
                            double epsilon, std::size_t grid_size, Rng& rng);

// LinUCB price rule. V = ucb_lambda*I + sum of past phi phi^T; the optimism
// bonus is c*sqrt(log(t+1))*||phi||_{V^-1}. For logistic demand the optimistic
// value is capped at 1 (or, with ucb_literal_max, floored at 1 as written in
// the source rule).
double ucb_price(const Vec& theta_hat, const SymMatrix& v_matrix, std::size_t t,
                 const Vec& x, const ModelSpec& spec, const Policy& policy);

struct EpisodeDiagnostics {
    std::size_t fit_fallbacks = 0;
    std::size_t refits = 0;
};

History run_episode(const ModelSpec& spec, const Policy& policy, ContextProcess proc,
                    std::size_t horizon, std::uint64_t seed,
                    EpisodeDiagnostics* diag = nullptr);

// CSV columns: t,p,x1..xk,d. Lines starting with '#' are metadata.
std::string history_to_csv(const History& h);
History history_from_csv(const std::string& text);
void history_write_binary(const History& h, std::ostream& os);
History history_read_binary(std::istream& is);

}  // namespace dpci
