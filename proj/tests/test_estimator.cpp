#include <doctest.h>

#include <cmath>

#include "estimator.hpp"
#include "oracles.hpp"

using namespace dpci;

namespace {

ModelSpec concat_linear(double noise) {
    ModelSpec m;
    m.family.kind = Family::linear;
    m.family.noise_std = noise;
    m.feature_map.kind = FeatureKind::concat;
    m.feature_map.context_dim = 1;
    m.theta0 = {1.0, 2.0};
    m.p_min = 0.0;
    m.p_max = 1.0;
    m.context_dim = 1;
    return m;
}

ModelSpec paper_spec() {
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

// histories built by hand: contexts chosen so concat features hit targets
History hand_history(std::vector<std::pair<Vec, double>> rows) {
    History h;
    for (auto& [phi, d] : rows) {
        h.prices.push_back(phi[0]);
        h.contexts.push_back({phi[1]});
        h.demands.push_back(d);
    }
    return h;
}

}  // namespace

TEST_CASE("least squares: rank deficiency and interpolation") {
    const ModelSpec m = concat_linear(0.1);
    History h = hand_history({{{1.0, 0.0}, 2.0}});
    CHECK_THROWS_AS(fit_least_squares(h, m, 1, 0.0), RankDeficiencyError);

    History h2 = hand_history({{{1.0, 0.0}, 1.0}, {{0.0, 1.0}, 2.0}});
    const Vec theta = fit_least_squares(h2, m, 2, 0.0);
    CHECK(theta[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(theta[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("least squares matches a QR oracle on a random well-conditioned instance") {
    const ModelSpec m = concat_linear(0.1);
    Rng rng(8);
    History h;
    std::vector<double> a;
    Vec b;
    for (int i = 0; i < 60; ++i) {
        const double p = rng.uniform();
        const double x = rng.uniform_range(-1.0, 1.0);
        const double d = 0.7 * p - 0.4 * x + 0.05 * rng.normal();
        h.prices.push_back(p);
        h.contexts.push_back({x});
        h.demands.push_back(d);
        a.push_back(p);
        a.push_back(x);
        b.push_back(d);
    }
    const Vec theta = fit_least_squares(h, m, h.size(), 0.0);
    const Vec ref = oracle::qr_solve(a, 60, 2, b);
    CHECK(std::abs(theta[0] - ref[0]) < 1e-8);
    CHECK(std::abs(theta[1] - ref[1]) < 1e-8);
}

TEST_CASE("least squares residual of the normal equations is tiny") {
    const ModelSpec m = concat_linear(0.1);
    Rng rng(88);
    History h;
    for (int i = 0; i < 200; ++i) {
        const double p = rng.uniform();
        const double x = rng.uniform_range(-1.0, 1.0);
        h.prices.push_back(p);
        h.contexts.push_back({x});
        h.demands.push_back(rng.normal());
    }
    const double lambda = 0.5;
    const Vec theta = fit_least_squares(h, m, h.size(), lambda);
    SymMatrix a(2);
    Vec b(2, 0.0);
    for (std::size_t t = 0; t < h.size(); ++t) {
        const Vec phi = feature(m.feature_map, h.prices[t], h.contexts[t]);
        a.add_outer(phi, 1.0);
        for (int k = 0; k < 2; ++k) b[k] += phi[k] * h.demands[t];
    }
    a.add_diag(lambda);
    const Vec ax = symvec(a, theta);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(ax[k] - b[k]) < 1e-10);
}

TEST_CASE("logistic newton: balanced data lands on probability one half") {
    const ModelSpec m = concat_linear(0.1);  // reuse concat features
    ModelSpec logit = m;
    logit.family.kind = Family::logistic;
    History h = hand_history({{{1.0, 0.0}, 1.0}, {{1.0, 0.0}, 0.0}});
    const FitResult fit = fit_logistic_newton(h, logit, 2, 0.0, {0.0, 0.0});
    CHECK(fit.converged);
    const Vec phi{1.0, 0.0};
    CHECK(std::abs(dot(phi, fit.theta)) < 1e-8);
    CHECK(fit.grad_norm < 1e-8);
}

TEST_CASE("logistic newton: separable data flags non-convergence, ridge restores it") {
    ModelSpec logit = concat_linear(0.1);
    logit.family.kind = Family::logistic;
    History h = hand_history({{{1.0, 0.4}, 1.0},
                              {{1.0, 0.8}, 1.0},
                              {{-1.0, -0.6}, 0.0},
                              {{-1.0, -0.3}, 0.0}});
    // perfectly separable along the first coordinate; p range is not enforced here
    const FitResult diverging = fit_logistic_newton(h, logit, 4, 0.0, {0.0, 0.0});
    CHECK_FALSE(diverging.converged);
    const FitResult ridged = fit_logistic_newton(h, logit, 4, 1e-4, {0.0, 0.0});
    CHECK(ridged.converged);
    CHECK(ridged.grad_norm < 1e-8);
}

TEST_CASE("logistic newton rejects non-binary demand") {
    ModelSpec logit = concat_linear(0.1);
    logit.family.kind = Family::logistic;
    History h = hand_history({{{1.0, 0.0}, 0.25}});
    CHECK_THROWS_AS(fit_logistic_newton(h, logit, 1, 0.0, {0.0, 0.0}), std::domain_error);
}

TEST_CASE("logistic newton agrees with a slow gradient-descent oracle") {
    const ModelSpec m = paper_spec();
    Policy pol;
    ContextProcess proc;
    proc.dim = 1;
    History h = run_episode(m, pol, proc, 2000, 21);
    const FitResult fit = fit_logistic_newton(h, m, h.size(), 0.0, Vec(2, 0.0));
    CHECK(fit.converged);

    const auto flat = detail::feature_matrix_flat(h, m);
    const Vec slow = oracle::logistic_gd(flat, h.demands, h.size(), 2, 0.0, 1000000, 0.01);
    CHECK(std::abs(fit.theta[0] - slow[0]) < 1e-4);
    CHECK(std::abs(fit.theta[1] - slow[1]) < 1e-4);
}

TEST_CASE("warm and cold starts land on the same optimum") {
    const ModelSpec m = paper_spec();
    Policy pol;
    ContextProcess proc;
    proc.dim = 1;
    History h = run_episode(m, pol, proc, 400, 23);
    const FitResult cold = fit_logistic_newton(h, m, h.size(), 1e-4, Vec(2, 0.0));
    const FitResult warm = fit_logistic_newton(h, m, h.size(), 1e-4, Vec{-0.9, 0.8});
    CHECK(std::abs(cold.theta[0] - warm.theta[0]) < 1e-7);
    CHECK(std::abs(cold.theta[1] - warm.theta[1]) < 1e-7);
}

TEST_CASE("pilot sequence: empty history and noiseless recovery") {
    const ModelSpec m = concat_linear(0.0);
    History empty;
    const PilotSequence seq = pilot_sequence(empty, m, 1e-4);
    CHECK(seq.estimates.size() == 1);
    CHECK(seq.estimates[0] == Vec{0.0, 0.0});

    // noiseless identifiable design: exact recovery once the prefix has rank 2
    Rng rng(3);
    History h;
    for (int i = 0; i < 40; ++i) {
        const double p = rng.uniform();
        const double x = rng.uniform_range(-1.0, 1.0);
        h.prices.push_back(p);
        h.contexts.push_back({x});
        h.demands.push_back(dot(feature(m.feature_map, p, {x}), m.theta0));
    }
    const PilotSequence seq2 = pilot_sequence(h, m, 0.0);
    CHECK(seq2.estimates.size() == 41);
    for (std::size_t t = 3; t <= 41; ++t) {
        CHECK(std::abs(seq2.estimates[t - 1][0] - 1.0) < 1e-8);
        CHECK(std::abs(seq2.estimates[t - 1][1] - 2.0) < 1e-8);
    }
    CHECK(seq2.fallback_count >= 1);  // the t = 2 fit on one row is rank deficient
}

TEST_CASE("pilot sequence is prefix-deterministic and converges on paper data") {
    const ModelSpec m = paper_spec();
    Policy pol;
    ContextProcess proc;
    proc.dim = 1;
    History h = run_episode(m, pol, proc, 600, 29);
    const PilotSequence full = pilot_sequence(h, m, 1e-4);

    History cut = h;
    cut.prices.resize(300);
    cut.contexts.resize(300);
    cut.demands.resize(300);
    const PilotSequence part = pilot_sequence(cut, m, 1e-4);
    for (std::size_t t = 1; t <= 300; ++t) CHECK(full.at_period(t) == part.at_period(t));

    // gradient norms honor the tolerance for converged fits
    for (std::size_t i = 40; i < full.grad_norms.size(); ++i)
        CHECK(full.grad_norms[i] < 1e-8);
}

TEST_CASE("pilot error shrinks with the horizon") {
    const ModelSpec m = paper_spec();
    Policy pol;
    ContextProcess proc;
    proc.dim = 1;
    Vec ratio_num, ratio_den;
    for (int trial = 0; trial < 40; ++trial) {
        History h = run_episode(m, pol, proc, 2000, 1000 + trial);
        const PilotSequence seq = pilot_sequence(h, m, 1e-4);
        auto err = [&](std::size_t t) {
            Vec d = seq.at_period(t);
            for (int k = 0; k < 2; ++k) d[k] -= m.theta0[k];
            return norm2(d);
        };
        ratio_num.push_back(err(2000));
        ratio_den.push_back(err(500));
    }
    std::sort(ratio_num.begin(), ratio_num.end());
    std::sort(ratio_den.begin(), ratio_den.end());
    const double med_num = ratio_num[ratio_num.size() / 2];
    const double med_den = ratio_den[ratio_den.size() / 2];
    CHECK(med_num / med_den > 0.3);
    CHECK(med_num / med_den < 0.85);
}
