#include <doctest.h>

#include <cmath>

#include "linalg.hpp"
#include "oracles.hpp"

using namespace dpci;

TEST_CASE("standard normal quantile matches the bisection oracle") {
    CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.95996398).epsilon(1e-7));
    CHECK(std_normal_quantile(0.95) == doctest::Approx(1.64485363).epsilon(1e-7));
    for (double p : {1e-6, 1e-3, 0.01, 0.2, 0.4, 0.6, 0.9, 0.99, 1.0 - 1e-6})
        CHECK(std::abs(std_normal_quantile(p) - oracle::normal_quantile_bisect(p)) < 1e-8);
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("quantile inverts an independently implemented CDF") {
    for (double x = -5.0; x <= 5.0 + 1e-12; x += 0.01)
        CHECK(std::abs(std_normal_quantile(oracle::normal_cdf_series(x)) - x) < 1e-7);
}

TEST_CASE("operator norm on fixed matrices") {
    Matrix eye = Matrix::identity(2);
    CHECK(operator_norm(eye) == doctest::Approx(1.0).epsilon(1e-10));

    Matrix diag(2, 2);
    diag(0, 0) = 2.0;
    diag(1, 1) = 3.0;
    CHECK(operator_norm(diag) == doctest::Approx(3.0).epsilon(1e-10));

    Matrix zero(3, 2);
    CHECK(operator_norm(zero) == 0.0);
}

TEST_CASE("operator norm matches a Jacobi SVD oracle on random matrices") {
    Rng rng(1234);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t rows = 2 + rep % 3;
        const std::size_t cols = 2 + (rep / 3) % 2;
        Matrix m(rows, cols);
        for (double& v : m.data) v = rng.normal();
        const double ref = oracle::svd_opnorm(m.data, rows, cols);
        CHECK(operator_norm(m) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("operator norm dominates the stretch of random unit vectors") {
    Rng rng(99);
    Matrix m(3, 3);
    for (double& v : m.data) v = rng.normal();
    const double norm = operator_norm(m);
    for (int rep = 0; rep < 100; ++rep) {
        Vec v(3);
        for (double& x : v) x = rng.normal();
        const double vn = norm2(v);
        if (vn == 0.0) continue;
        CHECK(norm2(matvec(m, v)) / vn <= norm * (1.0 + 1e-9));
    }
}

TEST_CASE("cholesky on fixed matrices") {
    SymMatrix eye = SymMatrix::identity(3);
    Matrix l = cholesky(eye);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(l(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    SymMatrix s(2);
    s.at(0, 0) = 4.0;
    s.at(0, 1) = s.at(1, 0) = 2.0;
    s.at(1, 1) = 3.0;
    l = cholesky(s);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cholesky reports the failing pivot") {
    SymMatrix s(2);
    s.at(0, 0) = 1.0;
    s.at(1, 1) = -1.0;
    try {
        cholesky(s);
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        CHECK(e.pivot_index == 1);
    }
}

TEST_CASE("cholesky reconstruction stays below 1e-10 on random PD matrices") {
    Rng rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rep % 4;
        SymMatrix s(n);
        for (int k = 0; k < 6; ++k) {
            Vec v(n);
            for (double& x : v) x = rng.normal();
            s.add_outer(v, 0.3 + rng.uniform());
        }
        s.add_diag(0.01);
        Matrix l = cholesky(s);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double rec = 0.0;
                for (std::size_t k = 0; k < n; ++k) rec += l(i, k) * l(j, k);
                CHECK(std::abs(rec - s.at(i, j)) < 1e-10);
            }
    }
}

TEST_CASE("jacobi eigendecomposition reconstructs and orders") {
    Rng rng(5);
    SymMatrix s(3);
    for (int k = 0; k < 5; ++k) {
        Vec v(3);
        for (double& x : v) x = rng.normal();
        s.add_outer(v, 1.0);
    }
    EigenDecomposition ed = jacobi_eigen(s);
    CHECK(ed.values[0] <= ed.values[1]);
    CHECK(ed.values[1] <= ed.values[2]);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double rec = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                rec += ed.vectors(i, k) * ed.values[k] * ed.vectors(j, k);
            CHECK(rec == doctest::Approx(s.at(i, j)).epsilon(1e-10));
        }
}

TEST_CASE("mvn sampling determinism and degenerate covariance") {
    const Vec mean = {1.0, -2.0};
    SymMatrix zero(2);
    Rng rng(42);
    CHECK(mvn_sample(mean, zero, rng) == mean);

    SymMatrix cov(2);
    cov.at(0, 0) = 2.0;
    cov.at(0, 1) = cov.at(1, 0) = 1.0;
    cov.at(1, 1) = 2.0;
    Rng a(7), b(7);
    const Vec va = mvn_sample(mean, cov, a);
    const Vec vb = mvn_sample(mean, cov, b);
    CHECK(va == vb);  // bit-identical under cloned streams
}

TEST_CASE("mvn sample moments: diagonal and correlated targets") {
    SymMatrix cov(2);
    cov.at(0, 0) = 1.0;
    cov.at(1, 1) = 4.0;
    MvnSampler sampler(Vec{0.0, 0.0}, cov);
    Rng rng(2024);
    const int n = 100000;
    double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
    for (int i = 0; i < n; ++i) {
        const Vec v = sampler.draw(rng);
        s1 += v[0];
        s2 += v[1];
        q1 += v[0] * v[0];
        q2 += v[1] * v[1];
    }
    CHECK(q1 / n > 0.95);
    CHECK(q1 / n < 1.05);
    CHECK(q2 / n > 0.95 * 4.0);
    CHECK(q2 / n < 1.05 * 4.0);

    SymMatrix corr(2);
    corr.at(0, 0) = corr.at(1, 1) = 2.0;
    corr.at(0, 1) = corr.at(1, 0) = 1.0;
    MvnSampler sampler2(Vec{0.0, 0.0}, corr);
    double c00 = 0, c01 = 0, c11 = 0;
    for (int i = 0; i < n; ++i) {
        const Vec v = sampler2.draw(rng);
        c00 += v[0] * v[0];
        c01 += v[0] * v[1];
        c11 += v[1] * v[1];
    }
    CHECK(std::abs(c00 / n - 2.0) < 0.05);
    CHECK(std::abs(c01 / n - 1.0) < 0.05);
    CHECK(std::abs(c11 / n - 2.0) < 0.05);
}

TEST_CASE("mvn sampler falls back to eigenvalue clipping on singular covariance") {
    SymMatrix cov(2);
    Vec v{1.0, 1.0};
    cov.add_outer(v, 1.0);  // rank one
    MvnSampler sampler(Vec{0.0, 0.0}, cov);
    CHECK(sampler.degenerate_fallback());
    Rng rng(3);
    const Vec draw = sampler.draw(rng);
    CHECK(draw[0] == doctest::Approx(draw[1]).epsilon(1e-12));
}

TEST_CASE("sym_power gives inverse square root") {
    SymMatrix cov(2);
    cov.at(0, 0) = 4.0;
    cov.at(1, 1) = 9.0;
    Matrix inv_sqrt = sym_power(cov, -0.5);
    CHECK(inv_sqrt(0, 0) == doctest::Approx(0.5));
    CHECK(inv_sqrt(1, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(inv_sqrt(0, 1) == doctest::Approx(0.0));
}
