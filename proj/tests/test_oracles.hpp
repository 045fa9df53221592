// Test-only oracles, kept independent of the library's evaluation paths:
// per-particle loop implementations of both particle systems, a plain
// trapezoid quadrature, and finite-difference helpers.

#pragma once

#include <cmath>
#include <functional>

#include "sympdyn/core.hpp"
#include "sympdyn/dynamics.hpp"

namespace oracles {

using sympdyn::AttentionWeights;
using sympdyn::Ensemble;
using sympdyn::Matrix;

// Prop.-style elementwise sums for the linear system:
//   F_i = (1/N) sum_j Y_j (X_j . A X_i)
//   G_i = -(1/N) sum_j <Y_i, Y_j> A X_j + V X_i
inline sympdyn::dynamics::FieldPair linear_fields_bruteforce(const Ensemble& e,
                                                             const AttentionWeights& w) {
    const std::size_t n = e.n(), d = e.dim();
    Matrix f(n, d), g(n, d);
    auto mat_apply = [&](const Matrix& m, const Matrix& rows, std::size_t i, std::size_t out_k) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += m(out_k, c) * rows(i, c);
        return s;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double score = 0.0; // X_j^T A X_i
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) score += e.X(j, a) * w.a()(a, b) * e.X(i, b);
            double dot_y = 0.0;
            for (std::size_t c = 0; c < d; ++c) dot_y += e.Y(i, c) * e.Y(j, c);
            for (std::size_t c = 0; c < d; ++c) {
                f(i, c) += e.Y(j, c) * score / static_cast<double>(n);
                g(i, c) -= dot_y * mat_apply(w.a(), e.X, j, c) / static_cast<double>(n);
            }
        }
        for (std::size_t c = 0; c < d; ++c) g(i, c) += mat_apply(w.v(), e.X, i, c);
    }
    return {std::move(f), std::move(g)};
}

// Per-particle softmax system:
//   F_i = N B Y_i / rowsum_i
//   G_i = (N/2) sum_j M_ij (R_i + R_j + 2) A X_j
inline sympdyn::dynamics::FieldPair softmax_fields_bruteforce(const Ensemble& e,
                                                              const AttentionWeights& w) {
    const std::size_t n = e.n(), d = e.dim();
    Matrix m(n, n);
    std::vector<double> rowsum(n, 0.0), r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) s += e.X(i, a) * w.a()(a, b) * e.X(j, b);
            m(i, j) = std::exp(s);
            rowsum[i] += m(i, j);
        }
    for (std::size_t i = 0; i < n; ++i) {
        double bnorm = 0.0;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) bnorm += e.Y(i, a) * w.b()(a, b) * e.Y(i, b);
        r[i] = bnorm / (rowsum[i] * rowsum[i]);
    }
    Matrix f(n, d), g(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            double by = 0.0;
            for (std::size_t b = 0; b < d; ++b) by += w.b()(c, b) * e.Y(i, b);
            f(i, c) = static_cast<double>(n) * by / rowsum[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double coeff = m(i, j) * (r[i] + r[j] + 2.0);
            for (std::size_t c = 0; c < d; ++c) {
                double ax = 0.0;
                for (std::size_t b = 0; b < d; ++b) ax += w.a()(c, b) * e.X(j, b);
                g(i, c) += 0.5 * static_cast<double>(n) * coeff * ax;
            }
        }
    }
    return {std::move(f), std::move(g)};
}

// plain composite trapezoid on a uniform grid
inline double trapezoid(const std::function<double(double)>& f, double a, double b,
                        std::size_t cells) {
    const double h = (b - a) / static_cast<double>(cells);
    double s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < cells; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

// central finite differences of a scalar function of one matrix entry
inline double central_diff(const std::function<double(double)>& f, double x0, double step) {
    return (f(x0 + step) - f(x0 - step)) / (2.0 * step);
}

} // namespace oracles
