#include "sympdyn/dynamics.hpp"

#include <cmath>
#include <string>

#include "sympdyn/error.hpp"
#include "sympdyn/kernels.hpp"

namespace sympdyn::dynamics {

namespace {

void require_dims(const Ensemble& e, const AttentionWeights& w, const char* op) {
    if (e.dim() != w.dim())
        throw DimensionError(std::string(op) + ": ensemble dimension " + std::to_string(e.dim()) +
                             " does not match weights dimension " + std::to_string(w.dim()));
}

Matrix score_exponents(const Matrix& x, const Matrix& a, double guard) {
    const Matrix s = mul_nt(x * a, x); // X A X^T
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j)
            if (!(s(i, j) <= guard)) throw ScoreOverflowError(i, j, s(i, j), guard);
    return s;
}

struct KineticParts {
    Matrix ybt;                  // Y B^T
    std::vector<double> b_norms; // ||Y_i||_B^2 per particle
};

KineticParts kinetic_parts(const Matrix& y, const Matrix& b) {
    KineticParts out;
    out.ybt = mul_nt(y, b);
    out.b_norms.resize(y.rows());
    for (std::size_t i = 0; i < y.rows(); ++i)
        out.b_norms[i] = kernels::ops().dot(y.row(i), out.ybt.row(i), y.cols());
    return out;
}

} // namespace

ScoreMatrix softmax_scores(const Ensemble& e, const AttentionWeights& w, double guard) {
    require_dims(e, w, "softmax_scores");
    ScoreMatrix out;
    const Matrix s = score_exponents(e.X, w.a(), guard);
    out.M = Matrix(s.rows(), s.cols());
    kernels::ops().exp_array(s.data(), out.M.data(), s.size());
    out.rowsum = row_sums(out.M);
    return out;
}

FieldPair linear_fields(const Ensemble& e, const AttentionWeights& w) {
    require_dims(e, w, "linear_fields");
    const double inv_n = 1.0 / static_cast<double>(e.n());
    FieldPair out;
    out.F = inv_n * ((e.X * w.a()) * mul_tn(e.X, e.Y));
    out.G = e.X * w.v() - inv_n * ((e.Y * mul_tn(e.Y, e.X)) * w.a());
    return out;
}

Matrix softmax_position_rate(const std::vector<double>& rowsum, const Matrix& y,
                             const AttentionWeights& w) {
    const double n = static_cast<double>(y.rows());
    Matrix f = mul_nt(y, w.b());
    std::vector<double> scale(rowsum.size());
    for (std::size_t i = 0; i < scale.size(); ++i) scale[i] = n / rowsum[i];
    kernels::ops().scale_rows(f.data(), scale.data(), f.rows(), f.cols());
    return f;
}

Matrix softmax_momentum_rate(const ScoreMatrix& sm, const Matrix& x, const Matrix& y,
                             const AttentionWeights& w) {
    const std::size_t n = x.rows();
    const KineticParts kp = kinetic_parts(y, w.b());
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = kp.b_norms[i] / (sm.rowsum[i] * sm.rowsum[i]);
    Matrix wmat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) wmat(i, j) = sm.M(i, j) * (r[i] + r[j] + 2.0);
    return (0.5 * static_cast<double>(n)) * ((wmat * x) * w.a());
}

FieldPair softmax_fields(const ScoreMatrix& sm, const Matrix& x, const Matrix& y,
                         const AttentionWeights& w) {
    FieldPair out;
    out.F = softmax_position_rate(sm.rowsum, y, w);
    out.G = softmax_momentum_rate(sm, x, y, w);
    return out;
}

FieldPair softmax_fields(const Ensemble& e, const AttentionWeights& w, double guard) {
    return softmax_fields(softmax_scores(e, w, guard), e.X, e.Y, w);
}

Matrix baseline_field(const ScoreMatrix& sm, const Matrix& x, const AttentionWeights& w) {
    Matrix out = sm.M * (x * w.v());
    std::vector<double> inv(sm.rowsum.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / sm.rowsum[i];
    kernels::ops().scale_rows(out.data(), inv.data(), out.rows(), out.cols());
    return out;
}

Matrix baseline_field(const Ensemble& e, const AttentionWeights& w, double guard) {
    return baseline_field(softmax_scores(e, w, guard), e.X, w);
}

double hamiltonian_softmax(const ScoreMatrix& sm, const Matrix& y, const AttentionWeights& w) {
    const KineticParts kp = kinetic_parts(y, w.b());
    const double n = static_cast<double>(y.rows());
    double kinetic = 0.0, potential = 0.0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        kinetic += kp.b_norms[i] / sm.rowsum[i];
        potential += sm.rowsum[i];
    }
    return 0.5 * n * (kinetic - potential);
}

double hamiltonian_softmax(const Ensemble& e, const AttentionWeights& w, double guard) {
    return hamiltonian_softmax(softmax_scores(e, w, guard), e.Y, w);
}

double hamiltonian_linear(const Ensemble& e, const AttentionWeights& w) {
    require_dims(e, w, "hamiltonian_linear");
    const double n = static_cast<double>(e.n());
    const Matrix xty = mul_tn(e.X, e.Y); // d x d
    const Matrix axty = w.a() * xty;
    const double kinetic = kernels::ops().dot(xty.data(), axty.data(), xty.size());
    const Matrix xv = e.X * w.v();
    const double potential = kernels::ops().dot(e.X.data(), xv.data(), e.X.size());
    return kinetic / (2.0 * n) - 0.5 * potential;
}

double time_dep_hamiltonian_softmax(double t, const Matrix& q, const Matrix& p,
                                    const AttentionWeights& w, const DampingSchedule& sched,
                                    double guard) {
    if (q.rows() != p.rows() || q.cols() != p.cols())
        throw DimensionError("time_dep_hamiltonian_softmax: Q and P shapes differ");
    const double et = eta(sched, t); // also validates the schedule domain
    const Ensemble eq(q, p, std::max(t, 0.0));
    const ScoreMatrix sm = softmax_scores(eq, w, guard);
    const KineticParts kp = kinetic_parts(p, w.b());
    const double n = static_cast<double>(q.rows());
    double kinetic = 0.0, potential = 0.0;
    for (std::size_t i = 0; i < q.rows(); ++i) {
        kinetic += kp.b_norms[i] / sm.rowsum[i];
        potential += sm.rowsum[i];
    }
    return 0.5 * n * (std::exp(-et) * kinetic - std::exp(et) * potential);
}

double energy_softmax(const ScoreMatrix& sm, std::size_t n) {
    double total = 0.0;
    for (double rs : sm.rowsum) total += rs;
    const double dn = static_cast<double>(n);
    return -total / (2.0 * dn * dn);
}

double energy_softmax(const Ensemble& e, const AttentionWeights& w, double guard) {
    return energy_softmax(softmax_scores(e, w, guard), e.n());
}

double energy_linear(const Ensemble& e, const AttentionWeights& w) {
    require_dims(e, w, "energy_linear");
    const Matrix xv = e.X * w.v();
    const double total = kernels::ops().dot(e.X.data(), xv.data(), e.X.size());
    return -total / (2.0 * static_cast<double>(e.n()));
}

} // namespace sympdyn::dynamics
