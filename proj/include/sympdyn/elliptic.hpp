#pragma once

#include <cstdint>

#include "sympdyn/core.hpp"

namespace sympdyn::elliptic {

// ---------------------------------------------------------------------------
// Elliptically contoured families. Only the variance factor kappa_g of the
// generator enters the moment dynamics.
// ---------------------------------------------------------------------------
enum class Generator { Gaussian, StudentT };

struct EllipticFamily {
    Generator tag = Generator::Gaussian;
    double dof = 0.0; // StudentT degrees of freedom, > 2

    static EllipticFamily gaussian() { return {Generator::Gaussian, 0.0}; }
    static EllipticFamily student_t(double v);

    double kappa_g() const { return tag == Generator::Gaussian ? 1.0 : dof / (dof - 2.0); }
};

// ---------------------------------------------------------------------------
// Population moment ODEs: with C = P (kappa_g Sigma + m m^T) A,
//   m'     = C m
//   Sigma' = Sigma C^T + C Sigma
//   P'     = -alpha(t) P - (C^T P + P C) + V
// ---------------------------------------------------------------------------
struct MomentRates {
    std::vector<double> mean;
    Matrix sigma;
    Matrix p;
};

MomentRates moment_rhs(const MomentState& s, double t, const AttentionWeights& w,
                       const DampingSchedule& sched);

// Zero-mean corollary: Sigma' = kappa (Sigma A Sigma P + P Sigma A Sigma),
// P' = -alpha P - kappa (A Sigma P^2 + P^2 Sigma A) + V.
struct ZeroMeanRates {
    Matrix sigma;
    Matrix p;
};

ZeroMeanRates zero_mean_rhs(const Matrix& sigma, const Matrix& p, double t,
                            const AttentionWeights& w, double kappa_g,
                            const DampingSchedule& sched);

// ---------------------------------------------------------------------------
// Finite-N closed moment system for the linear particle dynamics started at
// Y = 0: with S the empirical second moment and C = P S A,
//   S' = C S + S C^T,  P' = -alpha P - (C^T P + P C) + V,  G' = C G.
// Along the flow, X_i(t) = G_t X_i(0) and Y_i(t) = P_t X_i(t).
// ---------------------------------------------------------------------------
struct FiniteNMomentState {
    Matrix S, P, G;

    // S = (1/N) X0^T X0, P = 0, G = I
    static FiniteNMomentState initial(const Matrix& x0);
};

struct FiniteNRates {
    Matrix S, P, G;
};

FiniteNRates finite_n_rhs(const FiniteNMomentState& f, double t, const AttentionWeights& w,
                          const DampingSchedule& sched);

// ---------------------------------------------------------------------------
// Sampling and empirical estimators.
// ---------------------------------------------------------------------------

// N rows drawn from E(mean, sigma, g): Gaussian through the Cholesky factor,
// Student-t through an independent chi-square rescale per row.
Matrix sample(const EllipticFamily& fam, const std::vector<double>& mean, const Matrix& sigma,
              std::size_t n, std::uint64_t seed);

struct EmpiricalMoments {
    std::vector<double> mean;
    Matrix covariance;    // divisor N - 1
    Matrix second_moment; // divisor N
};

// Requires N >= 2 (covariance needs it).
EmpiricalMoments empirical_moments(const Matrix& x);

std::vector<double> empirical_mean(const Matrix& x);

// ---------------------------------------------------------------------------
// Fixed-step RK4 drivers for both moment systems (the dual-integration side
// of the equivalence oracle).
// ---------------------------------------------------------------------------
MomentState rk4_moment_step(const MomentState& s, double t, double h, const AttentionWeights& w,
                            const DampingSchedule& sched);
FiniteNMomentState rk4_finite_n_step(const FiniteNMomentState& f, double t, double h,
                                     const AttentionWeights& w, const DampingSchedule& sched);

} // namespace sympdyn::elliptic
