#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sympdyn/core.hpp"
#include "sympdyn/instances.hpp"
#include "sympdyn/rng.hpp"
#include "test_oracles.hpp"

using namespace sympdyn;

TEST_CASE("alpha evaluates each schedule family") {
    CHECK(alpha(DampingSchedule::constant(3.0), 7.0) == 3.0);
    CHECK(alpha(DampingSchedule::polynomial(3.0, 1.0), 2.0) == doctest::Approx(1.5));
    CHECK(alpha(DampingSchedule::log_linear(3.0, 0.5, 1.0), 3.0) == doctest::Approx(1.5));
    CHECK(alpha(DampingSchedule::zero(), 0.0) == 0.0);

    CHECK_THROWS_AS(alpha(DampingSchedule::polynomial(3.0, 1.0), 0.5), DomainError);
    CHECK_THROWS_AS(DampingSchedule::polynomial(3.0, 0.0), DomainError);
    CHECK_THROWS_AS(DampingSchedule::log_linear(1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("eta antiderivatives") {
    CHECK(eta(DampingSchedule::constant(1.0, 0.0), 2.0) == doctest::Approx(2.0));
    // alpha = 3/t with t0 = 1: eta(e) = 3 ln(e) = 3
    CHECK(eta(DampingSchedule::polynomial(3.0, 1.0), std::exp(1.0)) ==
          doctest::Approx(3.0).epsilon(1e-14));
    CHECK(eta(DampingSchedule::zero(), 17.0) == 0.0);
    CHECK(eta(DampingSchedule::log_linear(2.0, 0.5, 1.0), 2.0) ==
          doctest::Approx(2.0 * std::log(2.0) + 0.5));
    CHECK_THROWS_AS(eta(DampingSchedule::polynomial(3.0, 1.0), 0.9), DomainError);
}

TEST_CASE("sigma discrete damping coefficient") {
    CHECK(sigma(DampingSchedule::polynomial(3.0, 1.0), 1.0, 2.0) == doctest::Approx(0.125));
    CHECK(sigma(DampingSchedule::constant(1.0), 0.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(sigma(DampingSchedule::zero(), 3.0, 9.0) == 1.0);
    CHECK_THROWS_AS(sigma(DampingSchedule::constant(1.0), 2.0, 1.0), DomainError);
}

TEST_CASE("sigma equals exp(eta difference) and shrinks with the window") {
    CounterRng rng(21);
    for (int i = 0; i < 25; ++i) {
        DampingSchedule sched;
        switch (i % 4) {
            case 0: sched = DampingSchedule::zero(); break;
            case 1: sched = DampingSchedule::constant(rng.uniform(0.0, 3.0)); break;
            case 2: sched = DampingSchedule::polynomial(rng.uniform(0.0, 4.0), 1.0); break;
            default:
                sched = DampingSchedule::log_linear(rng.uniform(0.0, 4.0), rng.uniform(0.0, 2.0),
                                                    1.0);
        }
        const double a = 1.0 + rng.uniform(0.0, 2.0);
        const double b = a + rng.uniform(0.0, 3.0);
        const double s = sigma(sched, a, b);
        CHECK(s == doctest::Approx(std::exp(eta(sched, a) - eta(sched, b))).epsilon(1e-12));
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
        CHECK(sigma(sched, a, b + 0.5) <= s + 1e-15); // longer window, more damping
    }
}

TEST_CASE("exponential-Euler weight closed forms") {
    CHECK(exp_euler_weight(DampingSchedule::polynomial(3.0, 1.0), 0.1) == doctest::Approx(0.025));
    CHECK(exp_euler_weight(DampingSchedule::constant(2.0), 0.5) ==
          doctest::Approx((1.0 - std::exp(-1.0)) / 2.0).epsilon(1e-15));
    CHECK(exp_euler_weight(DampingSchedule::zero(), 0.4) == 0.4);
    CHECK_THROWS_AS(exp_euler_weight(DampingSchedule::constant(1.0), 0.0), DomainError);
}

TEST_CASE("log-linear weight (r=1, m=1, h=0.25) against the frozen quadrature value") {
    // fine-grid trapezoid of the defining double integral, frozen ahead of the
    // implementation: 0.11520313228561968
    const double w = exp_euler_weight(DampingSchedule::log_linear(1.0, 1.0, 1.0), 0.25);
    CHECK(w == doctest::Approx(0.11520313228561968).epsilon(1e-11));

    const double trap = oracles::trapezoid(
        [](double s) { return (s / 0.25) * std::exp(-(0.25 - s)); }, 0.0, 0.25, 250000);
    CHECK(w == doctest::Approx(trap).epsilon(1e-10));
}

TEST_CASE("closed forms agree with trapezoid quadrature across random draws") {
    CounterRng rng(22);
    for (int i = 0; i < 30; ++i) {
        const double h = rng.uniform(0.05, 1.0);
        const double r = rng.uniform(1.0, 4.0);
        const double m = rng.uniform(0.1, 3.0);
        auto integrand = [&](double s) { return std::pow(s / h, r) * std::exp(-m * (h - s)); };
        const double via_quad = oracles::trapezoid(integrand, 0.0, h, 400000);
        CHECK(exp_euler_weight(DampingSchedule::log_linear(r, m, 1.0), h) ==
              doctest::Approx(via_quad).epsilon(1e-9).scale(1.0));

        auto poly_integrand = [&](double s) { return std::pow(s / h, r); };
        CHECK(exp_euler_weight(DampingSchedule::polynomial(r, 1.0), h) ==
              doctest::Approx(oracles::trapezoid(poly_integrand, 0.0, h, 400000))
                  .epsilon(1e-9)
                  .scale(1.0));
    }
}

TEST_CASE("attention weights: symmetry checks and the B residual") {
    Matrix a(2, 2), v(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = a(1, 0) = 0.25;
    a(1, 1) = 2.0;
    v(0, 0) = 0.5;
    v(0, 1) = v(1, 0) = -0.1;
    v(1, 1) = 1.5;
    const AttentionWeights w = AttentionWeights::from_matrices(a, v);
    CHECK(max_abs_diff(w.b() * w.a(), w.v()) <= 1e-10 * max_abs(w.v()));

    Matrix bad = a;
    bad(0, 1) += 1e-6;
    CHECK_THROWS_AS(AttentionWeights::from_matrices(bad, v), DomainError);
    CHECK_THROWS_AS(AttentionWeights::from_matrices(a, transpose(bad)), DomainError);
}

TEST_CASE("attention weights: near-singular A is rejected") {
    Matrix a(2, 2), v = Matrix::identity(2);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-12;
    CHECK_THROWS_AS(AttentionWeights::from_matrices(a, v), SingularMatrixError);
}

TEST_CASE("seeded shared-basis weights satisfy every type invariant") {
    CounterRng rng(23);
    for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{4}, std::size_t{6}}) {
        const AttentionWeights w = shared_basis_weights(rng, d, 0.7);
        CHECK(asymmetry(w.a()) <= 1e-12);
        CHECK(asymmetry(w.v()) <= 1e-12);
        CHECK(max_abs_diff(w.b() * w.a(), w.v()) <= 1e-10 * max_abs(w.v()));
        // B symmetric positive definite (softmax-side requirement)
        CHECK(asymmetry(w.b()) <= 1e-10);
        const EighResult eb = eigh(0.5 * (w.b() + transpose(w.b())));
        CHECK(eb.values.front() > 0.0);
    }
}

TEST_CASE("symmetrized score matrix from K, Q factors") {
    CounterRng rng(24);
    const Matrix k = gaussian_matrix(rng, 3, 4);
    const Matrix q = gaussian_matrix(rng, 3, 4);
    const Matrix s = AttentionWeights::symmetrized_score_matrix(k, q);
    CHECK(asymmetry(s) == 0.0);
    const Matrix ktq = mul_tn(k, q);
    CHECK(max_abs_diff(s, 0.5 * (ktq + transpose(ktq))) <= 1e-15);
}

TEST_CASE("ensemble invariants") {
    CHECK_THROWS_AS(Ensemble(Matrix(2, 2), Matrix(2, 3)), DimensionError);
    CHECK_THROWS_AS(Ensemble(Matrix(0, 2), Matrix(0, 2)), DimensionError);
    Matrix bad(1, 1);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Ensemble(bad, Matrix(1, 1)), DomainError);
    CHECK_THROWS_AS(Ensemble(Matrix(1, 1), Matrix(1, 1), -0.5), DomainError);

    const Ensemble e(Matrix(3, 2), Matrix(3, 2), 1.5);
    CHECK(e.n() == 3);
    CHECK(e.dim() == 2);
    CHECK(e.t == 1.5);
}
