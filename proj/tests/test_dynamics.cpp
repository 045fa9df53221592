#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sympdyn/dynamics.hpp"
#include "sympdyn/instances.hpp"
#include "test_oracles.hpp"

using namespace sympdyn;

namespace {

Matrix scalar_matrix(double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

AttentionWeights scalar_weights(double a, double v) {
    return AttentionWeights::from_matrices(scalar_matrix(a), scalar_matrix(v));
}

Ensemble permuted(const Ensemble& e, const std::vector<std::size_t>& perm) {
    Matrix x(e.n(), e.dim()), y(e.n(), e.dim());
    for (std::size_t i = 0; i < e.n(); ++i)
        for (std::size_t j = 0; j < e.dim(); ++j) {
            x(i, j) = e.X(perm[i], j);
            y(i, j) = e.Y(perm[i], j);
        }
    return Ensemble(std::move(x), std::move(y), e.t);
}

} // namespace

TEST_CASE("linear fields: zero momentum and the scalar example") {
    CounterRng rng(31);
    const AttentionWeights w = shared_basis_weights(rng, 3, 1.0);
    const Ensemble rest(gaussian_matrix(rng, 5, 3, 0.8), Matrix(5, 3));
    const dynamics::FieldPair fp = dynamics::linear_fields(rest, w);
    CHECK(max_abs(fp.F) == 0.0);
    CHECK(max_abs_diff(fp.G, rest.X * w.v()) <= 1e-15);

    // N=1, d=1, A=2, V=3, X=1, Y=1: F = 2, G = -1*1*1*2 + 1*3 = 1
    const Ensemble e(scalar_matrix(1.0), scalar_matrix(1.0));
    const dynamics::FieldPair s = dynamics::linear_fields(e, scalar_weights(2.0, 3.0));
    CHECK(s.F(0, 0) == doctest::Approx(2.0));
    CHECK(s.G(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("linear fields match the per-particle brute-force oracle") {
    CounterRng rng(32);
    for (int i = 0; i < 10; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 8);
        const std::size_t d = 1 + static_cast<std::size_t>(rng.next_u64() % 4);
        const AttentionWeights w = shared_basis_weights(rng, d, 0.8);
        const Ensemble e = gaussian_ensemble(rng, n, d, 0.7, 0.7);
        const dynamics::FieldPair fast = dynamics::linear_fields(e, w);
        const dynamics::FieldPair slow = oracles::linear_fields_bruteforce(e, w);
        CHECK(max_abs_diff(fast.F, slow.F) <= 1e-12);
        CHECK(max_abs_diff(fast.G, slow.G) <= 1e-12);
    }
}

TEST_CASE("softmax scores: trivial values, symmetry, and the overflow guard") {
    CounterRng rng(33);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.8);

    const Ensemble zero(Matrix(4, 2), Matrix(4, 2));
    const dynamics::ScoreMatrix sm = dynamics::softmax_scores(zero, w);
    CHECK(max_abs_diff(sm.M, Matrix(4, 4, 1.0)) == 0.0);
    for (double rs : sm.rowsum) CHECK(rs == doctest::Approx(4.0));

    // N=1, d=1, A=1, X=2 -> M = e^4
    const Ensemble one(scalar_matrix(2.0), scalar_matrix(0.0));
    CHECK(dynamics::softmax_scores(one, scalar_weights(1.0, 1.0)).M(0, 0) ==
          doctest::Approx(std::exp(4.0)).epsilon(1e-14));

    // A = I, orthonormal rows: off-diagonals 1, diagonal e
    Matrix ortho(2, 2);
    ortho(0, 0) = 1.0;
    ortho(1, 1) = 1.0;
    const AttentionWeights id2 =
        AttentionWeights::from_matrices(Matrix::identity(2), Matrix::identity(2));
    const dynamics::ScoreMatrix so =
        dynamics::softmax_scores(Ensemble(ortho, Matrix(2, 2)), id2);
    CHECK(so.M(0, 1) == doctest::Approx(1.0));
    CHECK(so.M(1, 0) == doctest::Approx(1.0));
    CHECK(so.M(0, 0) == doctest::Approx(std::exp(1.0)));

    // symmetry for symmetric A
    const Ensemble e = gaussian_ensemble(rng, 6, 2, 0.8);
    const dynamics::ScoreMatrix sr = dynamics::softmax_scores(e, w);
    CHECK(asymmetry(sr.M) <= 1e-12 * max_abs(sr.M));
    const std::vector<double> rs = row_sums(sr.M);
    for (std::size_t i = 0; i < rs.size(); ++i)
        CHECK(sr.rowsum[i] == doctest::Approx(rs[i]).epsilon(1e-12));

    // guard names the offending pair
    Matrix big(2, 1);
    big(0, 0) = 30.0;
    big(1, 0) = 30.0;
    try {
        dynamics::softmax_scores(Ensemble(big, Matrix(2, 1)), scalar_weights(1.0, 1.0));
        FAIL("expected ScoreOverflowError");
    } catch (const ScoreOverflowError& err) {
        CHECK(err.row() == 0);
        CHECK(err.col() == 0);
        CHECK(err.value() == doctest::Approx(900.0));
        CHECK(std::string(err.what()).find("(0, 0)") != std::string::npos);
    }
}

TEST_CASE("softmax fields: N = 1 closed form and degenerate zeros") {
    const double x = 0.7, y = -0.4;
    const Ensemble e(scalar_matrix(x), scalar_matrix(y));
    const dynamics::FieldPair fp = dynamics::softmax_fields(e, scalar_weights(1.0, 1.0));
    CHECK(fp.F(0, 0) == doctest::Approx(std::exp(-x * x) * y).epsilon(1e-14));
    CHECK(fp.G(0, 0) ==
          doctest::Approx((y * y * std::exp(-x * x) + std::exp(x * x)) * x).epsilon(1e-14));

    CounterRng rng(34);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.8);
    const dynamics::FieldPair z =
        dynamics::softmax_fields(Ensemble(Matrix(3, 2), Matrix(3, 2)), w);
    CHECK(max_abs(z.F) == 0.0);
    CHECK(max_abs(z.G) == 0.0);
}

TEST_CASE("softmax fields match the per-particle brute-force oracle") {
    CounterRng rng(35);
    for (int i = 0; i < 10; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 8);
        const std::size_t d = 1 + static_cast<std::size_t>(rng.next_u64() % 4);
        const AttentionWeights w = shared_basis_weights(rng, d, 0.5);
        const Ensemble e = gaussian_ensemble(rng, n, d, 0.5, 0.5);
        const dynamics::FieldPair fast = dynamics::softmax_fields(e, w);
        const dynamics::FieldPair slow = oracles::softmax_fields_bruteforce(e, w);
        CHECK(max_abs_diff(fast.F, slow.F) <= 1e-12 * std::max(1.0, max_abs(slow.F)));
        CHECK(max_abs_diff(fast.G, slow.G) <= 1e-12 * std::max(1.0, max_abs(slow.G)));
    }
}

TEST_CASE("fields are permutation-equivariant") {
    CounterRng rng(36);
    const AttentionWeights w = shared_basis_weights(rng, 3, 0.5);
    const Ensemble e = gaussian_ensemble(rng, 6, 3, 0.5, 0.5);
    const std::vector<std::size_t> perm{4, 0, 5, 2, 1, 3};
    const Ensemble pe = permuted(e, perm);

    const dynamics::FieldPair base_sm = dynamics::softmax_fields(e, w);
    const dynamics::FieldPair perm_sm = dynamics::softmax_fields(pe, w);
    const dynamics::FieldPair base_lin = dynamics::linear_fields(e, w);
    const dynamics::FieldPair perm_lin = dynamics::linear_fields(pe, w);
    for (std::size_t i = 0; i < e.n(); ++i)
        for (std::size_t j = 0; j < e.dim(); ++j) {
            CHECK(perm_sm.F(i, j) == doctest::Approx(base_sm.F(perm[i], j)).epsilon(1e-12));
            CHECK(perm_sm.G(i, j) == doctest::Approx(base_sm.G(perm[i], j)).epsilon(1e-12));
            CHECK(perm_lin.F(i, j) == doctest::Approx(base_lin.F(perm[i], j)).epsilon(1e-12));
            CHECK(perm_lin.G(i, j) == doctest::Approx(base_lin.G(perm[i], j)).epsilon(1e-12));
        }
}

TEST_CASE("baseline field: single token, zero values, two-token hand evaluation") {
    CounterRng rng(37);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.8);
    const Ensemble single(gaussian_matrix(rng, 1, 2, 1.0), Matrix(1, 2));
    CHECK(max_abs_diff(dynamics::baseline_field(single, w), single.X * w.v()) <= 1e-14);

    const AttentionWeights vzero =
        AttentionWeights::from_matrices(Matrix::identity(2), Matrix(2, 2));
    const Ensemble e = gaussian_ensemble(rng, 4, 2, 0.6);
    CHECK(max_abs(dynamics::baseline_field(e, vzero)) == 0.0);

    // N = 2, d = 1: direct two-term softmax evaluation
    const double a = 0.8, v = 1.3, x0 = 0.5, x1 = -0.9;
    Matrix x(2, 1);
    x(0, 0) = x0;
    x(1, 0) = x1;
    const Matrix field =
        dynamics::baseline_field(Ensemble(x, Matrix(2, 1)), scalar_weights(a, v));
    const double m00 = std::exp(x0 * a * x0), m01 = std::exp(x0 * a * x1);
    const double m10 = std::exp(x1 * a * x0), m11 = std::exp(x1 * a * x1);
    CHECK(field(0, 0) ==
          doctest::Approx((m00 * v * x0 + m01 * v * x1) / (m00 + m01)).epsilon(1e-14));
    CHECK(field(1, 0) ==
          doctest::Approx((m10 * v * x0 + m11 * v * x1) / (m10 + m11)).epsilon(1e-14));
}

TEST_CASE("softmax Hamiltonian: pinned values and finite-difference consistency") {
    CHECK(dynamics::hamiltonian_softmax(Ensemble(scalar_matrix(0.0), scalar_matrix(1.0)),
                                        scalar_weights(1.0, 1.0)) == doctest::Approx(0.0));

    CounterRng rng(38);
    const AttentionWeights wz = shared_basis_weights(rng, 2, 0.8);
    CHECK(dynamics::hamiltonian_softmax(Ensemble(Matrix(5, 2), Matrix(5, 2)), wz) ==
          doctest::Approx(-12.5)); // -N^2/2

    const std::size_t n = 4, d = 3;
    const AttentionWeights w = shared_basis_weights(rng, d, 0.5);
    const Ensemble e = gaussian_ensemble(rng, n, d, 0.5, 0.5);
    const dynamics::FieldPair fp = dynamics::softmax_fields(e, w);
    const double step = 1e-5;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Ensemble ep = e, em = e;
            ep.Y(i, j) += step;
            em.Y(i, j) -= step;
            const double dy = (dynamics::hamiltonian_softmax(ep, w) -
                               dynamics::hamiltonian_softmax(em, w)) /
                              (2 * step);
            CHECK(dy == doctest::Approx(fp.F(i, j)).epsilon(1e-5).scale(1.0));
            ep = e;
            em = e;
            ep.X(i, j) += step;
            em.X(i, j) -= step;
            const double dx = (dynamics::hamiltonian_softmax(ep, w) -
                               dynamics::hamiltonian_softmax(em, w)) /
                              (2 * step);
            CHECK(dx == doctest::Approx(-fp.G(i, j)).epsilon(1e-5).scale(1.0));
        }
}

TEST_CASE("linear Hamiltonian: pinned values and finite-difference consistency") {
    CounterRng rng(39);
    const AttentionWeights wz = shared_basis_weights(rng, 2, 0.8);
    CHECK(dynamics::hamiltonian_linear(Ensemble(Matrix(4, 2), Matrix(4, 2)), wz) == 0.0);

    CHECK(dynamics::hamiltonian_linear(Ensemble(scalar_matrix(1.0), scalar_matrix(1.0)),
                                       scalar_weights(2.0, 3.0)) == doctest::Approx(-0.5));

    const std::size_t n = 4, d = 2;
    const AttentionWeights w = shared_basis_weights(rng, d, 0.7);
    const Ensemble e = gaussian_ensemble(rng, n, d, 0.7, 0.7);
    const dynamics::FieldPair fp = dynamics::linear_fields(e, w);
    const double step = 1e-5;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Ensemble ep = e, em = e;
            ep.Y(i, j) += step;
            em.Y(i, j) -= step;
            const double dy =
                (dynamics::hamiltonian_linear(ep, w) - dynamics::hamiltonian_linear(em, w)) /
                (2 * step);
            CHECK(dy == doctest::Approx(fp.F(i, j)).epsilon(1e-5).scale(1.0));
            ep = e;
            em = e;
            ep.X(i, j) += step;
            em.X(i, j) -= step;
            const double dx =
                (dynamics::hamiltonian_linear(ep, w) - dynamics::hamiltonian_linear(em, w)) /
                (2 * step);
            CHECK(dx == doctest::Approx(-fp.G(i, j)).epsilon(1e-5).scale(1.0));
        }
}

TEST_CASE("time-dependent Hamiltonian reductions and the scalar oracle") {
    CounterRng rng(40);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.5);
    const Ensemble e = gaussian_ensemble(rng, 4, 2, 0.5, 0.5);

    // eta = 0 reduction
    CHECK(dynamics::time_dep_hamiltonian_softmax(2.0, e.X, e.Y, w, DampingSchedule::zero()) ==
          doctest::Approx(dynamics::hamiltonian_softmax(e, w)).epsilon(1e-14));

    // P = e^{eta} Y makes the whole expression e^{eta} H(Q, Y)
    const DampingSchedule sched = DampingSchedule::constant(1.0);
    const double t = 1.0;
    const double et = eta(sched, t);
    CHECK(dynamics::time_dep_hamiltonian_softmax(t, e.X, std::exp(et) * e.Y, w, sched) ==
          doctest::Approx(std::exp(et) * dynamics::hamiltonian_softmax(e, w)).epsilon(1e-12));

    // independent scalar re-evaluation of the full formula
    const Matrix p = gaussian_matrix(rng, 4, 2, 0.4);
    double kinetic = 0.0, potential = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            double score = 0.0;
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) score += e.X(i, a) * w.a()(a, b) * e.X(j, b);
            rs += std::exp(score);
        }
        double bn = 0.0;
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) bn += p(i, a) * w.b()(a, b) * p(i, b);
        kinetic += bn / rs;
        potential += rs;
    }
    const double expected =
        0.5 * 4.0 * (std::exp(-et) * kinetic - std::exp(et) * potential);
    CHECK(dynamics::time_dep_hamiltonian_softmax(t, e.X, p, w, sched) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("interaction energies") {
    CounterRng rng(41);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.8);
    CHECK(dynamics::energy_softmax(Ensemble(Matrix(6, 2), Matrix(6, 2)), w) ==
          doctest::Approx(-0.5));
    CHECK(dynamics::energy_softmax(Ensemble(scalar_matrix(1.0), scalar_matrix(0.0)),
                                   scalar_weights(1.0, 1.0)) ==
          doctest::Approx(-std::exp(1.0) / 2.0).epsilon(1e-14));

    CHECK(dynamics::energy_linear(Ensemble(Matrix(3, 2), Matrix(3, 2)), w) == 0.0);
    CHECK(dynamics::energy_linear(Ensemble(scalar_matrix(2.0), scalar_matrix(0.0)),
                                  scalar_weights(1.0, 3.0)) == doctest::Approx(-6.0));

    // seeded N = 8 against brute-force double loops
    const Ensemble e = gaussian_ensemble(rng, 8, 2, 0.5);
    double pair_sum = 0.0, quad_sum = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            double score = 0.0;
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) score += e.X(i, a) * w.a()(a, b) * e.X(j, b);
            pair_sum += std::exp(score);
        }
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) quad_sum += e.X(i, a) * w.v()(a, b) * e.X(i, b);
    }
    CHECK(dynamics::energy_softmax(e, w) ==
          doctest::Approx(-pair_sum / (2.0 * 64.0)).epsilon(1e-13));
    CHECK(dynamics::energy_linear(e, w) ==
          doctest::Approx(-quad_sum / 16.0).epsilon(1e-13));
}

TEST_CASE("dimension mismatches are rejected") {
    CounterRng rng(42);
    const AttentionWeights w = shared_basis_weights(rng, 3, 1.0);
    const Ensemble e = gaussian_ensemble(rng, 4, 2, 1.0);
    CHECK_THROWS_AS(dynamics::linear_fields(e, w), DimensionError);
    CHECK_THROWS_AS(dynamics::softmax_scores(e, w), DimensionError);
    CHECK_THROWS_AS(dynamics::energy_linear(e, w), DimensionError);
}
