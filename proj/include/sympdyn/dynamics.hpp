#pragma once

#include <vector>

#include "sympdyn/core.hpp"

namespace sympdyn::dynamics {

// Conservative rates of an accelerated attention particle system. G excludes
// the -alpha(t) Y damping term; integrators add dissipation themselves, so one
// field implementation serves every discretization.
struct FieldPair {
    Matrix F; // rate of X
    Matrix G; // conservative rate of Y
};

// M_{ij} = exp(X_i^T A X_j) with cached row sums.
struct ScoreMatrix {
    Matrix M;
    std::vector<double> rowsum;
};

inline constexpr double kDefaultScoreGuard = 700.0;

// Throws ScoreOverflowError naming the first offending pair when any exponent
// X_i^T A X_j exceeds the guard.
ScoreMatrix softmax_scores(const Ensemble& e, const AttentionWeights& w,
                           double guard = kDefaultScoreGuard);

// F = (1/N) X A X^T Y ;  G = -(1/N) Y Y^T X A + X V
FieldPair linear_fields(const Ensemble& e, const AttentionWeights& w);

// F = N diag(M1)^{-1} Y B^T
// G = (N/2) ({R, M} + 2M) X A,  R = diag((Y ⊙ Y B^T) 1 ⊘ (M1 ⊙ M1))
FieldPair softmax_fields(const Ensemble& e, const AttentionWeights& w,
                         double guard = kDefaultScoreGuard);
FieldPair softmax_fields(const ScoreMatrix& sm, const Matrix& x, const Matrix& y,
                         const AttentionWeights& w);

// The two rates separately, against a prebuilt score matrix (momentum-linear
// reuse inside the integrators).
Matrix softmax_position_rate(const std::vector<double>& rowsum, const Matrix& y,
                             const AttentionWeights& w);
Matrix softmax_momentum_rate(const ScoreMatrix& sm, const Matrix& x, const Matrix& y,
                             const AttentionWeights& w);

// Classical (momentum-free) softmax attention flow: row i is the softmax-
// weighted average of V X_j over j.
Matrix baseline_field(const Ensemble& e, const AttentionWeights& w,
                      double guard = kDefaultScoreGuard);
Matrix baseline_field(const ScoreMatrix& sm, const Matrix& x, const AttentionWeights& w);

// H = (N/2) tr(diag(M1)^{-1} Y B^T Y^T) - (N/2) 1^T M 1
double hamiltonian_softmax(const Ensemble& e, const AttentionWeights& w,
                           double guard = kDefaultScoreGuard);
double hamiltonian_softmax(const ScoreMatrix& sm, const Matrix& y, const AttentionWeights& w);

// Conservative generator of the linear system:
// H = (1/2N) tr(Y^T X A X^T Y) - (1/2) tr(X V X^T)
double hamiltonian_linear(const Ensemble& e, const AttentionWeights& w);

// Time-dependent Hamiltonian of the undamped reformulation, evaluated at
// transformed momenta P = e^{eta(t)} Y.
double time_dep_hamiltonian_softmax(double t, const Matrix& q, const Matrix& p,
                                    const AttentionWeights& w, const DampingSchedule& sched,
                                    double guard = kDefaultScoreGuard);

// Particle interaction energies.
double energy_softmax(const Ensemble& e, const AttentionWeights& w,
                      double guard = kDefaultScoreGuard);
double energy_softmax(const ScoreMatrix& sm, std::size_t n);
double energy_linear(const Ensemble& e, const AttentionWeights& w);

} // namespace sympdyn::dynamics
