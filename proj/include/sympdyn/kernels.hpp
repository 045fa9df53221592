#pragma once

#include <cstddef>

// Data-parallel inner loops behind the dense-matrix layer. Every entry point
// exists twice: a scalar reference kernel and an AVX2 variant compiled in its
// own translation unit with -mavx2 -mfma. The active table is chosen once at
// startup from CPUID, overridable with SYMPDYN_SIMD=scalar|avx2|auto.
// The two variants are equivalence-tested in tests/test_kernels.cpp.

namespace sympdyn::kernels {

struct Ops {
    // out[i] = exp(in[i])
    void (*exp_array)(const double* in, double* out, std::size_t n);
    // c(m x n) = a(m x k) * b(k x n), row-major, c overwritten
    void (*matmul_nn)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
    // c(m x n) = a(m x k) * b^T, b stored (n x k)
    void (*matmul_nt)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
    // c(m x n) = a^T * b, a stored (k x m), b stored (k x n)
    void (*matmul_tn)(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n);
    // out[i] = sum_j a(i, j)
    void (*row_sums)(const double* a, double* out, std::size_t rows, std::size_t cols);
    // a(i, :) *= s[i]
    void (*scale_rows)(double* a, const double* s, std::size_t rows, std::size_t cols);
    // y = alpha * x + beta * y
    void (*axpby)(double alpha, const double* x, double beta, double* y, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
};

enum class Backend { Scalar, Avx2 };

const Ops& scalar_ops();

// Null when this build/CPU cannot run AVX2.
const Ops* avx2_ops();

// The dispatched table (resolved once, thread-safe).
const Ops& ops();

Backend active_backend();
const char* backend_name(Backend b);

} // namespace sympdyn::kernels
