#include "sympdyn/elliptic.hpp"

#include <cmath>

#include "sympdyn/error.hpp"
#include "sympdyn/rng.hpp"

namespace sympdyn::elliptic {

EllipticFamily EllipticFamily::student_t(double v) {
    if (!(v > 2.0)) throw DomainError("EllipticFamily: Student-t requires dof > 2");
    return {Generator::StudentT, v};
}

namespace {

Matrix outer(const std::vector<double>& a) {
    Matrix m(a.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a[i] * a[j];
    return m;
}

void require_square(const Matrix& m, std::size_t d, const char* what) {
    if (m.rows() != d || m.cols() != d)
        throw DimensionError(std::string(what) + ": expected " + std::to_string(d) + "x" +
                             std::to_string(d));
}

} // namespace

MomentRates moment_rhs(const MomentState& s, double t, const AttentionWeights& w,
                       const DampingSchedule& sched) {
    const std::size_t d = s.mean.size();
    require_square(s.sigma, d, "moment_rhs: Sigma");
    require_square(s.p, d, "moment_rhs: P");
    if (!(s.kappa_g > 0.0)) throw DomainError("moment_rhs: kappa_g must be positive");
    if (w.dim() != d) throw DimensionError("moment_rhs: weights dimension mismatch");
    const double a = alpha(sched, t);

    const Matrix c = (s.p * (s.kappa_g * s.sigma + outer(s.mean))) * w.a();
    MomentRates out;
    out.mean = mat_vec(c, s.mean);
    out.sigma = mul_nt(s.sigma, c) + c * s.sigma; // Sigma C^T + C Sigma
    out.p = w.v() - a * s.p - (mul_tn(c, s.p) + s.p * c);
    return out;
}

ZeroMeanRates zero_mean_rhs(const Matrix& sigma, const Matrix& p, double t,
                            const AttentionWeights& w, double kappa_g,
                            const DampingSchedule& sched) {
    const std::size_t d = w.dim();
    require_square(sigma, d, "zero_mean_rhs: Sigma");
    require_square(p, d, "zero_mean_rhs: P");
    if (!(kappa_g > 0.0)) throw DomainError("zero_mean_rhs: kappa_g must be positive");
    const double a = alpha(sched, t);

    const Matrix sas = (sigma * w.a()) * sigma;
    ZeroMeanRates out;
    out.sigma = kappa_g * (sas * p + p * sas);
    const Matrix p2 = p * p;
    out.p = w.v() - a * p - kappa_g * ((w.a() * sigma) * p2 + p2 * (sigma * w.a()));
    return out;
}

FiniteNMomentState FiniteNMomentState::initial(const Matrix& x0) {
    FiniteNMomentState f;
    f.S = (1.0 / static_cast<double>(x0.rows())) * mul_tn(x0, x0);
    f.P = Matrix(x0.cols(), x0.cols());
    f.G = Matrix::identity(x0.cols());
    return f;
}

FiniteNRates finite_n_rhs(const FiniteNMomentState& f, double t, const AttentionWeights& w,
                          const DampingSchedule& sched) {
    const std::size_t d = w.dim();
    require_square(f.S, d, "finite_n_rhs: S");
    require_square(f.P, d, "finite_n_rhs: P");
    require_square(f.G, d, "finite_n_rhs: G");
    const double a = alpha(sched, t);

    const Matrix c = (f.P * f.S) * w.a();
    FiniteNRates out;
    out.S = c * f.S + mul_nt(f.S, c);
    out.P = w.v() - a * f.P - (mul_tn(c, f.P) + f.P * c);
    out.G = c * f.G;
    return out;
}

Matrix sample(const EllipticFamily& fam, const std::vector<double>& mean, const Matrix& sigma,
              std::size_t n, std::uint64_t seed) {
    const std::size_t d = mean.size();
    require_square(sigma, d, "sample: Sigma");
    if (n < 1) throw DomainError("sample: need N >= 1");
    const Matrix l = cholesky(sigma); // throws when Sigma is not SPD

    CounterRng rng(seed);
    Matrix x(n, d);
    std::vector<double> z(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) z[k] = rng.normal();
        double scale = 1.0;
        if (fam.tag == Generator::StudentT)
            scale = std::sqrt(fam.dof / rng.chi_square(fam.dof));
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= j; ++k) acc += l(j, k) * z[k];
            x(i, j) = mean[j] + scale * acc;
        }
    }
    return x;
}

std::vector<double> empirical_mean(const Matrix& x) {
    if (x.rows() < 1) throw DomainError("empirical_mean: need N >= 1");
    std::vector<double> m(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) m[j] += x(i, j);
    for (double& v : m) v /= static_cast<double>(x.rows());
    return m;
}

EmpiricalMoments empirical_moments(const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n < 2) throw DomainError("empirical_moments: covariance requires N >= 2");
    EmpiricalMoments out;
    out.mean = empirical_mean(x);
    out.second_moment = (1.0 / static_cast<double>(n)) * mul_tn(x, x);
    out.covariance = Matrix(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                out.covariance(a, b) += (x(i, a) - out.mean[a]) * (x(i, b) - out.mean[b]);
    out.covariance *= 1.0 / static_cast<double>(n - 1);
    return out;
}

namespace {

MomentState axpy_state(const MomentState& s, double h, const MomentRates& r) {
    MomentState out = s;
    for (std::size_t i = 0; i < out.mean.size(); ++i) out.mean[i] += h * r.mean[i];
    out.sigma += h * r.sigma;
    out.p += h * r.p;
    return out;
}

FiniteNMomentState axpy_state(const FiniteNMomentState& f, double h, const FiniteNRates& r) {
    FiniteNMomentState out = f;
    out.S += h * r.S;
    out.P += h * r.P;
    out.G += h * r.G;
    return out;
}

} // namespace

MomentState rk4_moment_step(const MomentState& s, double t, double h, const AttentionWeights& w,
                            const DampingSchedule& sched) {
    const MomentRates k1 = moment_rhs(s, t, w, sched);
    const MomentRates k2 = moment_rhs(axpy_state(s, 0.5 * h, k1), t + 0.5 * h, w, sched);
    const MomentRates k3 = moment_rhs(axpy_state(s, 0.5 * h, k2), t + 0.5 * h, w, sched);
    const MomentRates k4 = moment_rhs(axpy_state(s, h, k3), t + h, w, sched);
    MomentState out = s;
    const double w6 = h / 6.0;
    for (std::size_t i = 0; i < out.mean.size(); ++i)
        out.mean[i] += w6 * (k1.mean[i] + 2.0 * k2.mean[i] + 2.0 * k3.mean[i] + k4.mean[i]);
    out.sigma += w6 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
    out.p += w6 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    return out;
}

FiniteNMomentState rk4_finite_n_step(const FiniteNMomentState& f, double t, double h,
                                     const AttentionWeights& w, const DampingSchedule& sched) {
    const FiniteNRates k1 = finite_n_rhs(f, t, w, sched);
    const FiniteNRates k2 = finite_n_rhs(axpy_state(f, 0.5 * h, k1), t + 0.5 * h, w, sched);
    const FiniteNRates k3 = finite_n_rhs(axpy_state(f, 0.5 * h, k2), t + 0.5 * h, w, sched);
    const FiniteNRates k4 = finite_n_rhs(axpy_state(f, h, k3), t + h, w, sched);
    FiniteNMomentState out = f;
    const double w6 = h / 6.0;
    out.S += w6 * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
    out.P += w6 * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P);
    out.G += w6 * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G);
    return out;
}

} // namespace sympdyn::elliptic
