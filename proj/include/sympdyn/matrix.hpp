#pragma once

#include <cstddef>
#include <vector>

#include "sympdyn/error.hpp"

namespace sympdyn {

// Dense row-major matrix of doubles. Products and reductions go through the
// dispatched kernels; everything is value-semantic.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) noexcept { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const noexcept { return data_.data() + i * cols_; }

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);

Matrix operator*(const Matrix& a, const Matrix& b); // a * b
Matrix mul_nt(const Matrix& a, const Matrix& b);    // a * b^T
Matrix mul_tn(const Matrix& a, const Matrix& b);    // a^T * b

Matrix transpose(const Matrix& a);
double trace(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double frobenius(const Matrix& a);
double asymmetry(const Matrix& a); // max |a - a^T|
bool all_finite(const Matrix& a);

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x);
std::vector<double> row_sums(const Matrix& a);

// Symmetric eigendecomposition (cyclic Jacobi): a = vectors * diag(values) * vectors^T,
// eigenvalues ascending. Input must be symmetric.
struct EighResult {
    std::vector<double> values;
    Matrix vectors;
};
EighResult eigh(const Matrix& a);

// Lower-triangular Cholesky factor of an SPD matrix; throws SingularMatrixError otherwise.
Matrix cholesky(const Matrix& a);

} // namespace sympdyn
