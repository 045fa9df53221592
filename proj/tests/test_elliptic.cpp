#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sympdyn/elliptic.hpp"
#include "sympdyn/instances.hpp"
#include "sympdyn/integrators.hpp"

using namespace sympdyn;

namespace {

Matrix scalar_matrix(double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
}

} // namespace

TEST_CASE("elliptic families expose kappa_g") {
    CHECK(elliptic::EllipticFamily::gaussian().kappa_g() == 1.0);
    CHECK(elliptic::EllipticFamily::student_t(5.0).kappa_g() == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(elliptic::EllipticFamily::student_t(2.0), DomainError);
}

TEST_CASE("moment rhs: P = 0 stasis and the scalar corollary reduction") {
    CounterRng rng(61);
    const AttentionWeights w = shared_basis_weights(rng, 2, 1.0);
    MomentState s{{0.3, -0.2}, Matrix::identity(2), Matrix(2, 2), 1.0};
    const elliptic::MomentRates r = elliptic::moment_rhs(s, 1.0, w, DampingSchedule::zero());
    CHECK(r.mean[0] == 0.0);
    CHECK(r.mean[1] == 0.0);
    CHECK(max_abs(r.sigma) == 0.0);
    CHECK(max_abs_diff(r.p, w.v()) == 0.0);

    // d = 1, m = 0: Sigma' = 2 a sigma^4 p, P' = -alpha p - 2 a p^2 sigma^2 + v
    const double a = 0.7, v = 1.1, sig2 = 1.4, p = -0.6, al = 0.5;
    const AttentionWeights ws =
        AttentionWeights::from_matrices(scalar_matrix(a), scalar_matrix(v));
    MomentState sc{{0.0}, scalar_matrix(sig2), scalar_matrix(p), 1.0};
    const elliptic::MomentRates rs =
        elliptic::moment_rhs(sc, 3.0, ws, DampingSchedule::constant(al));
    CHECK(rs.sigma(0, 0) == doctest::Approx(2.0 * a * sig2 * sig2 * p).epsilon(1e-14));
    CHECK(rs.p(0, 0) ==
          doctest::Approx(-al * p - 2.0 * a * p * p * sig2 + v).epsilon(1e-14));
}

TEST_CASE("moment rhs keeps Sigma-dot and P-dot symmetric") {
    CounterRng rng(62);
    for (int i = 0; i < 5; ++i) {
        const AttentionWeights w = shared_basis_weights(rng, 3, 1.0);
        Matrix g = gaussian_matrix(rng, 3, 3);
        Matrix sym = 0.5 * (g + transpose(g));
        MomentState s{{rng.normal(), rng.normal(), rng.normal()},
                      mul_nt(g, g) + 0.1 * Matrix::identity(3), sym, 5.0 / 3.0};
        const elliptic::MomentRates r = elliptic::moment_rhs(s, 1.0, w, DampingSchedule::zero());
        CHECK(asymmetry(r.sigma) <= 1e-14 * std::max(1.0, max_abs(r.sigma)));
        CHECK(asymmetry(r.p) <= 1e-14 * std::max(1.0, max_abs(r.p)));
    }
}

TEST_CASE("zero-mean corollary equals the general rhs at m = 0") {
    CounterRng rng(63);
    for (int i = 0; i < 20; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
        const AttentionWeights w = shared_basis_weights(rng, d, 1.0);
        Matrix g = gaussian_matrix(rng, d, d);
        const Matrix sigma = mul_nt(g, g) + 0.1 * Matrix::identity(d);
        Matrix p = gaussian_matrix(rng, d, d);
        p = 0.5 * (p + transpose(p));
        const double kappa = rng.uniform(1.0, 2.0);

        MomentState s{std::vector<double>(d, 0.0), sigma, p, kappa};
        const elliptic::MomentRates full =
            elliptic::moment_rhs(s, 2.0, w, DampingSchedule::constant(0.7));
        const elliptic::ZeroMeanRates reduced =
            elliptic::zero_mean_rhs(sigma, p, 2.0, w, kappa, DampingSchedule::constant(0.7));
        CHECK(max_abs_diff(full.sigma, reduced.sigma) <= 1e-14 * std::max(1.0, max_abs(full.sigma)));
        CHECK(max_abs_diff(full.p, reduced.p) <= 1e-14 * std::max(1.0, max_abs(full.p)));
    }

    // d = 1, kappa = 1, Sigma = 1, A = 1, P = 1, V = 0, alpha = 0
    Matrix a = scalar_matrix(1.0);
    Matrix v0(1, 1);
    const AttentionWeights wv = AttentionWeights::from_matrices(a, v0);
    const elliptic::ZeroMeanRates r = elliptic::zero_mean_rhs(
        scalar_matrix(1.0), scalar_matrix(1.0), 0.0, wv, 1.0, DampingSchedule::zero());
    CHECK(r.sigma(0, 0) == doctest::Approx(2.0));
    CHECK(r.p(0, 0) == doctest::Approx(-2.0));
}

TEST_CASE("finite-N system: initialization and the dual-integration equivalence") {
    CounterRng rng(64);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.8);
    const Ensemble e0 = gaussian_ensemble(rng, 8, 2, 0.7);

    elliptic::FiniteNMomentState f = elliptic::FiniteNMomentState::initial(e0.X);
    CHECK(max_abs_diff(f.S, (1.0 / 8.0) * mul_tn(e0.X, e0.X)) == 0.0);
    CHECK(max_abs(f.P) == 0.0);
    CHECK(max_abs_diff(f.G, Matrix::identity(2)) == 0.0);

    const elliptic::FiniteNRates r0 =
        elliptic::finite_n_rhs(f, 0.0, w, DampingSchedule::zero());
    CHECK(max_abs(r0.S) == 0.0);
    CHECK(max_abs(r0.G) == 0.0);
    CHECK(max_abs_diff(r0.P, w.v()) == 0.0);

    const DampingSchedule damping = DampingSchedule::constant(1.0);
    integrators::IntegratorSpec spec;
    spec.method = integrators::Method::Rk4Reference;
    spec.h = 1e-3;
    spec.damping = damping;
    const integrators::Trajectory traj =
        integrators::integrate(e0, integrators::SystemKind::Linear, w, spec, 500, 1);
    REQUIRE(traj.ok());

    double dev_x = 0.0, dev_y = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        dev_x = std::max(dev_x, max_abs_diff(traj.states[k].X, mul_nt(e0.X, f.G)));
        dev_y = std::max(dev_y, max_abs_diff(traj.states[k].Y, mul_nt(traj.states[k].X, f.P)));
        if (k + 1 < traj.states.size())
            f = elliptic::rk4_finite_n_step(f, traj.times[k], 1e-3, w, damping);
    }
    CHECK(dev_x <= 1e-8);
    CHECK(dev_y <= 1e-8);
}

TEST_CASE("sampling: Gaussian and Student-t moments, shapes, SPD rejection") {
    const std::size_t n = 100000;
    std::vector<double> mean{0.0, 0.0};
    const Matrix sigma = Matrix::identity(2);

    const Matrix xg = elliptic::sample(elliptic::EllipticFamily::gaussian(), mean, sigma, n, 7);
    const elliptic::EmpiricalMoments mg = elliptic::empirical_moments(xg);
    for (double m : mg.mean) CHECK(std::fabs(m) <= 0.02);
    CHECK(max_abs_diff(mg.covariance, sigma) <= 0.05);

    // Student-t with v = 5: covariance approaches kappa_g Sigma = (5/3) Sigma
    const Matrix xt =
        elliptic::sample(elliptic::EllipticFamily::student_t(5.0), mean, sigma, n, 8);
    const elliptic::EmpiricalMoments mt = elliptic::empirical_moments(xt);
    CHECK(max_abs_diff(mt.covariance, (5.0 / 3.0) * sigma) <= 10.0 / std::sqrt(double(n)));

    const Matrix single =
        elliptic::sample(elliptic::EllipticFamily::gaussian(), mean, sigma, 1, 9);
    CHECK(single.rows() == 1);
    CHECK(single.cols() == 2);
    CHECK(all_finite(single));

    Matrix bad = Matrix::identity(2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(elliptic::sample(elliptic::EllipticFamily::gaussian(), mean, bad, 4, 1),
                    SingularMatrixError);
}

TEST_CASE("sampling is deterministic per seed") {
    std::vector<double> mean{1.0, -1.0};
    Matrix sigma(2, 2);
    sigma(0, 0) = 2.0;
    sigma(0, 1) = sigma(1, 0) = 0.3;
    sigma(1, 1) = 1.0;
    const Matrix a = elliptic::sample(elliptic::EllipticFamily::student_t(4.0), mean, sigma, 64, 5);
    const Matrix b = elliptic::sample(elliptic::EllipticFamily::student_t(4.0), mean, sigma, 64, 5);
    CHECK(max_abs_diff(a, b) == 0.0);
    const Matrix c = elliptic::sample(elliptic::EllipticFamily::student_t(4.0), mean, sigma, 64, 6);
    CHECK(max_abs_diff(a, c) > 0.0);
}

TEST_CASE("empirical moments: hand values, degenerate point, brute-force match") {
    Matrix pm(2, 2);
    pm(0, 0) = 1.0;
    pm(0, 1) = 0.0;
    pm(1, 0) = -1.0;
    pm(1, 1) = 0.0;
    const elliptic::EmpiricalMoments m = elliptic::empirical_moments(pm);
    CHECK(m.mean[0] == 0.0);
    CHECK(m.mean[1] == 0.0);
    CHECK(m.covariance(0, 0) == doctest::Approx(2.0));
    CHECK(m.covariance(1, 1) == 0.0);
    CHECK(m.second_moment(0, 0) == doctest::Approx(1.0));

    Matrix rep(3, 2, 0.7);
    CHECK(max_abs(elliptic::empirical_moments(rep).covariance) == 0.0);

    CHECK_THROWS_AS(elliptic::empirical_moments(Matrix(1, 2)), DomainError);

    CounterRng rng(65);
    const Matrix x = gaussian_matrix(rng, 20, 3);
    const elliptic::EmpiricalMoments fast = elliptic::empirical_moments(x);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            double cov = 0.0, second = 0.0;
            for (std::size_t i = 0; i < 20; ++i) {
                cov += (x(i, a) - fast.mean[a]) * (x(i, b) - fast.mean[b]);
                second += x(i, a) * x(i, b);
            }
            CHECK(fast.covariance(a, b) == doctest::Approx(cov / 19.0).epsilon(1e-13));
            CHECK(fast.second_moment(a, b) == doctest::Approx(second / 20.0).epsilon(1e-13));
        }
}

TEST_CASE("moment integration preserves symmetry and positive definiteness") {
    CounterRng rng(66);
    const AttentionWeights w = shared_basis_weights(rng, 2, 0.8);
    MomentState s{{0.5, -0.3}, Matrix(2, 2), Matrix(2, 2), 1.0};
    s.sigma(0, 0) = 0.8;
    s.sigma(0, 1) = s.sigma(1, 0) = 0.2;
    s.sigma(1, 1) = 0.5;
    const DampingSchedule damping = DampingSchedule::constant(1.0);

    double worst_asym = 0.0, min_eig = 1e300;
    for (int k = 0; k < 2000; ++k) {
        s = elliptic::rk4_moment_step(s, k * 1e-3, 1e-3, w, damping);
        worst_asym = std::max({worst_asym, asymmetry(s.sigma), asymmetry(s.p)});
        min_eig = std::min(min_eig, eigh(s.sigma).values.front());
    }
    CHECK(worst_asym <= 1e-10);
    CHECK(min_eig > 0.0);
}
