#include "sympdyn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sympdyn/kernels.hpp"

namespace sympdyn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()) + ")");
}

} // namespace

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    kernels::ops().axpby(1.0, other.data(), 1.0, data(), size());
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    kernels::ops().axpby(-1.0, other.data(), 1.0, data(), size());
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    kernels::ops().axpby(0.0, data(), s, data(), size());
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    kernels::ops().matmul_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Matrix mul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("mul_nt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    kernels::ops().matmul_nt(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
    return c;
}

Matrix mul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("mul_tn: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    kernels::ops().matmul_tn(a.data(), b.data(), c.data(), a.cols(), a.rows(), b.cols());
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double trace(const Matrix& a) {
    double s = 0.0;
    const std::size_t n = std::min(a.rows(), a.cols());
    for (std::size_t i = 0; i < n; ++i) s += a(i, i);
    return s;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i]));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
    return m;
}

double frobenius(const Matrix& a) {
    return std::sqrt(kernels::ops().dot(a.data(), a.data(), a.size()));
}

double asymmetry(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("asymmetry: matrix not square");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            m = std::max(m, std::fabs(a(i, j) - a(j, i)));
    return m;
}

bool all_finite(const Matrix& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a.data()[i])) return false;
    return true;
}

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw DimensionError("mat_vec: dimensions differ");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = kernels::ops().dot(a.row(i), x.data(), a.cols());
    return y;
}

std::vector<double> row_sums(const Matrix& a) {
    std::vector<double> s(a.rows());
    kernels::ops().row_sums(a.data(), s.data(), a.rows(), a.cols());
    return s;
}

EighResult eigh(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("eigh: matrix not square");
    const std::size_t n = a.rows();
    Matrix w = a;
    Matrix q = Matrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += w(i, j) * w(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(1.0, frobenius(w));
    for (int sweep = 0; sweep < 100 && off_norm() > 1e-14 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apq = w(p, r);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (w(r, r) - w(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double wkp = w(k, p), wkr = w(k, r);
                    w(k, p) = c * wkp - s * wkr;
                    w(k, r) = s * wkp + c * wkr;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double wpk = w(p, k), wrk = w(r, k);
                    w(p, k) = c * wpk - s * wrk;
                    w(r, k) = s * wpk + c * wrk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double qkp = q(k, p), qkr = q(k, r);
                    q(k, p) = c * qkp - s * qkr;
                    q(k, r) = s * qkp + c * qkr;
                }
            }
        }
    }

    EighResult res;
    res.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.values[i] = w(i, i);

    // sort eigenpairs ascending
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return res.values[x] < res.values[y]; });
    std::vector<double> vals(n);
    Matrix vecs(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        vals[i] = res.values[order[i]];
        for (std::size_t k = 0; k < n; ++k) vecs(k, i) = q(k, order[i]);
    }
    res.values = std::move(vals);
    res.vectors = std::move(vecs);
    return res;
}

Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s))
                    throw SingularMatrixError("cholesky: matrix is not positive definite (pivot " +
                                              std::to_string(i) + ")");
                l(i, j) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

} // namespace sympdyn
