#pragma once

#include <cstddef>
#include <vector>

#include "sympdyn/matrix.hpp"

namespace sympdyn {

// ---------------------------------------------------------------------------
// Ensemble: paired position/momentum matrices, the particle representation of
// (rho_t, grad Phi_t). Row i holds token i; Y_i = grad Phi_t(X_i).
// ---------------------------------------------------------------------------
struct Ensemble {
    Matrix X, Y;
    double t = 0.0;

    Ensemble() = default;
    Ensemble(Matrix x, Matrix y, double time = 0.0);

    std::size_t n() const noexcept { return X.rows(); }
    std::size_t dim() const noexcept { return X.cols(); }
};

// ---------------------------------------------------------------------------
// AttentionWeights: symmetric A (= K^T Q), symmetric V, and B = V A^{-1}.
// Construction rejects non-symmetric inputs and near-singular A.
// ---------------------------------------------------------------------------
class AttentionWeights {
public:
    static AttentionWeights from_matrices(const Matrix& a, const Matrix& v);

    // (K^T Q + Q^T K) / 2 for callers holding the factors instead of A.
    static Matrix symmetrized_score_matrix(const Matrix& k, const Matrix& q);

    const Matrix& a() const noexcept { return a_; }
    const Matrix& v() const noexcept { return v_; }
    const Matrix& b() const noexcept { return b_; }
    std::size_t dim() const noexcept { return a_.rows(); }

private:
    AttentionWeights(Matrix a, Matrix v, Matrix b)
        : a_(std::move(a)), v_(std::move(v)), b_(std::move(b)) {}
    Matrix a_, v_, b_;
};

// ---------------------------------------------------------------------------
// DampingSchedule: the family alpha(t) with antiderivative eta, the discrete
// coefficient sigma_k, and the exponential-Euler weight.
//   Zero:        alpha = 0
//   Constant:    alpha = m,          eta = m (t - t0)
//   Polynomial:  alpha = r / t,      eta = r ln(t / t0)
//   LogLinear:   alpha = r / t + m,  eta = r ln(t / t0) + m (t - t0)
// ---------------------------------------------------------------------------
enum class DampingKind { Zero, Constant, Polynomial, LogLinear };

struct DampingSchedule {
    DampingKind kind = DampingKind::Zero;
    double m = 0.0;
    double r = 0.0;
    double t0 = 0.0;

    static DampingSchedule zero();
    static DampingSchedule constant(double m, double t0 = 0.0);
    static DampingSchedule polynomial(double r, double t0);
    static DampingSchedule log_linear(double r, double m, double t0);

    bool is_zero() const noexcept { return kind == DampingKind::Zero; }
};

double alpha(const DampingSchedule& sched, double t);
double eta(const DampingSchedule& sched, double t);

// exp(eta(t_k) - eta(t_next)); requires t0 <= t_k <= t_next.
double sigma(const DampingSchedule& sched, double t_k, double t_next);

// w = int_0^h exp(-int_s^h alpha(z) dz) ds on the normalized window [0, h].
// Closed forms for Zero/Constant/Polynomial; tanh-sinh quadrature (abs tol
// 1e-12) for LogLinear.
double exp_euler_weight(const DampingSchedule& sched, double h);

// ---------------------------------------------------------------------------
// MomentState: the (m, Sigma, P) triple evolved by the population moment ODEs,
// plus the generator variance factor kappa_g.
// ---------------------------------------------------------------------------
struct MomentState {
    std::vector<double> mean;
    Matrix sigma;
    Matrix p;
    double kappa_g = 1.0;
};

} // namespace sympdyn
