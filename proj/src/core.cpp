#include "sympdyn/core.hpp"

#include <cmath>
#include <string>

#include "sympdyn/error.hpp"

namespace sympdyn {

// ------------------------------- Ensemble ----------------------------------

Ensemble::Ensemble(Matrix x, Matrix y, double time) : X(std::move(x)), Y(std::move(y)), t(time) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols())
        throw DimensionError("Ensemble: X and Y must have identical dimensions");
    if (X.rows() < 1 || X.cols() < 1) throw DimensionError("Ensemble: need N >= 1 and d >= 1");
    if (!all_finite(X) || !all_finite(Y)) throw DomainError("Ensemble: non-finite entries");
    if (!(t >= 0.0)) throw DomainError("Ensemble: time must be non-negative");
}

// ---------------------------- AttentionWeights ------------------------------

AttentionWeights AttentionWeights::from_matrices(const Matrix& a, const Matrix& v) {
    if (a.rows() != a.cols() || v.rows() != v.cols() || a.rows() != v.rows())
        throw DimensionError("AttentionWeights: A and V must be square with equal dimension");
    if (asymmetry(a) > 1e-12)
        throw DomainError("AttentionWeights: A is not symmetric (asymmetry " +
                          std::to_string(asymmetry(a)) + ")");
    if (asymmetry(v) > 1e-12)
        throw DomainError("AttentionWeights: V is not symmetric (asymmetry " +
                          std::to_string(asymmetry(v)) + ")");

    // B = V A^{-1} via the symmetric eigendecomposition of A.
    const EighResult eig = eigh(a);
    double max_mag = 0.0, min_mag = 0.0;
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        const double mag = std::fabs(eig.values[i]);
        max_mag = std::max(max_mag, mag);
        min_mag = (i == 0) ? mag : std::min(min_mag, mag);
    }
    if (min_mag < 1e-10 * max_mag)
        throw SingularMatrixError("AttentionWeights: A is numerically singular (|lambda|_min = " +
                                  std::to_string(min_mag) + ", |lambda|_max = " +
                                  std::to_string(max_mag) + ")");

    Matrix inv_scaled = eig.vectors; // columns scaled by 1/lambda
    for (std::size_t j = 0; j < inv_scaled.cols(); ++j)
        for (std::size_t i = 0; i < inv_scaled.rows(); ++i) inv_scaled(i, j) /= eig.values[j];
    const Matrix a_inv = mul_nt(inv_scaled, eig.vectors);
    Matrix b = v * a_inv;

    const double residual = max_abs_diff(b * a, v);
    if (residual > 1e-10 * std::max(max_abs(v), 1e-300))
        throw SingularMatrixError("AttentionWeights: residual ||BA - V|| too large (" +
                                  std::to_string(residual) + ")");
    return AttentionWeights(a, v, std::move(b));
}

Matrix AttentionWeights::symmetrized_score_matrix(const Matrix& k, const Matrix& q) {
    if (k.rows() != q.rows() || k.cols() != q.cols())
        throw DimensionError("symmetrized_score_matrix: K and Q must share shape");
    const Matrix ktq = mul_tn(k, q);
    return 0.5 * (ktq + transpose(ktq));
}

// ---------------------------- DampingSchedule -------------------------------

DampingSchedule DampingSchedule::zero() { return {DampingKind::Zero, 0.0, 0.0, 0.0}; }

DampingSchedule DampingSchedule::constant(double m, double t0) {
    if (m < 0.0) throw DomainError("DampingSchedule: m must be >= 0");
    if (t0 < 0.0) throw DomainError("DampingSchedule: t0 must be >= 0");
    return {DampingKind::Constant, m, 0.0, t0};
}

DampingSchedule DampingSchedule::polynomial(double r, double t0) {
    if (r < 0.0) throw DomainError("DampingSchedule: r must be >= 0");
    if (!(t0 > 0.0)) throw DomainError("DampingSchedule: polynomial damping requires t0 > 0");
    return {DampingKind::Polynomial, 0.0, r, t0};
}

DampingSchedule DampingSchedule::log_linear(double r, double m, double t0) {
    if (r < 0.0 || m < 0.0) throw DomainError("DampingSchedule: r and m must be >= 0");
    if (!(t0 > 0.0)) throw DomainError("DampingSchedule: log-linear damping requires t0 > 0");
    return {DampingKind::LogLinear, m, r, t0};
}

namespace {

void require_in_domain(const DampingSchedule& sched, double t, const char* op) {
    if (sched.kind == DampingKind::Zero) return;
    if (t < sched.t0)
        throw DomainError(std::string(op) + ": t = " + std::to_string(t) +
                          " below schedule origin t0 = " + std::to_string(sched.t0));
    if ((sched.kind == DampingKind::Polynomial || sched.kind == DampingKind::LogLinear) &&
        t == 0.0)
        throw DomainError(std::string(op) + ": t = 0 is singular for this schedule");
}

// tanh-sinh quadrature of f over [a, b], level-doubled until the absolute
// tolerance is met. Handles the algebraic endpoint behavior of (s/h)^r.
template <typename F>
double tanh_sinh(const F& f, double a, double b, double abs_tol) {
    constexpr double kHalfPi = 1.5707963267948966;
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    const double t_max = 6.11; // weights below ~1e-17 past this point

    auto node_sum = [&](double step, bool odd_only) {
        double s = 0.0;
        const int k0 = odd_only ? 1 : 0;
        const int stride = odd_only ? 2 : 1;
        for (int k = k0;; k += stride) {
            const double t = k * step;
            if (t > t_max) break;
            const double sh = kHalfPi * std::sinh(t);
            const double ch = std::cosh(sh);
            const double w = kHalfPi * std::cosh(t) / (ch * ch);
            const double x = std::tanh(sh);
            double contrib = w * f(c + half * x);
            if (k > 0) contrib += w * f(c - half * x);
            s += contrib;
            if (k > 0 && w < 1e-17) break;
        }
        return s;
    };

    double step = 1.0;
    double sum = node_sum(step, false);
    double integral = half * step * sum;
    for (int level = 0; level < 12; ++level) {
        step *= 0.5;
        sum += node_sum(step, true);
        const double next = half * step * sum;
        if (level >= 2 && std::fabs(next - integral) < abs_tol) return next;
        integral = next;
    }
    return integral;
}

} // namespace

double alpha(const DampingSchedule& sched, double t) {
    require_in_domain(sched, t, "alpha");
    switch (sched.kind) {
        case DampingKind::Zero: return 0.0;
        case DampingKind::Constant: return sched.m;
        case DampingKind::Polynomial: return sched.r / t;
        case DampingKind::LogLinear: return sched.r / t + sched.m;
    }
    return 0.0;
}

double eta(const DampingSchedule& sched, double t) {
    require_in_domain(sched, t, "eta");
    switch (sched.kind) {
        case DampingKind::Zero: return 0.0;
        case DampingKind::Constant: return sched.m * (t - sched.t0);
        case DampingKind::Polynomial: return sched.r * std::log(t / sched.t0);
        case DampingKind::LogLinear:
            return sched.r * std::log(t / sched.t0) + sched.m * (t - sched.t0);
    }
    return 0.0;
}

double sigma(const DampingSchedule& sched, double t_k, double t_next) {
    if (t_next < t_k) throw DomainError("sigma: t_next must be >= t_k");
    if (sched.is_zero()) return 1.0;
    return std::exp(eta(sched, t_k) - eta(sched, t_next));
}

double exp_euler_weight(const DampingSchedule& sched, double h) {
    if (!(h > 0.0)) throw DomainError("exp_euler_weight: h must be positive");
    switch (sched.kind) {
        case DampingKind::Zero: return h;
        case DampingKind::Constant:
            return sched.m == 0.0 ? h : -std::expm1(-sched.m * h) / sched.m;
        case DampingKind::Polynomial: return h / (sched.r + 1.0);
        case DampingKind::LogLinear: {
            const double r = sched.r, m = sched.m;
            return tanh_sinh(
                [&](double s) { return std::pow(s / h, r) * std::exp(-m * (h - s)); }, 0.0, h,
                1e-12);
        }
    }
    return h;
}

} // namespace sympdyn
