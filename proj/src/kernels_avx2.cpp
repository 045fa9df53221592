// AVX2 + FMA kernel variants. This TU is compiled with -mavx2 -mfma and is
// only ever entered after the dispatcher has confirmed CPU support.

#include "sympdyn/kernels.hpp"

#include <cmath>
#include <cstring>
#include <immintrin.h>

namespace sympdyn::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// exp on 4 lanes, Cephes-style: range-reduce by ln2 in two parts, rational
// approximation of the remainder, scale by 2^n through the exponent bits.
// |x| <= 700 on every lane (callers guarantee it or take the scalar fixup).
inline __m256d vexp4(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, x);
    r = _mm256_fnmadd_pd(n, c2, r);

    __m256d rr = _mm256_mul_pd(r, r);
    __m256d px = _mm256_fmadd_pd(p0, rr, p1);
    px = _mm256_fmadd_pd(px, rr, p2);
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
    qx = _mm256_fmadd_pd(qx, rr, q2);
    qx = _mm256_fmadd_pd(qx, rr, q3);

    __m256d y = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    y = _mm256_fmadd_pd(_mm256_set1_pd(2.0), y, _mm256_set1_pd(1.0));

    // 2^n via exponent-field arithmetic; n fits in int32 for |x| <= 700.
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(y, _mm256_castsi256_pd(bits));
}

void exp_array_avx2(const double* in, double* out, std::size_t n) {
    const __m256d bound = _mm256_set1_pd(700.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(in + i);
        __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
        if (_mm256_movemask_pd(_mm256_cmp_pd(absx, bound, _CMP_GT_OQ)) != 0) {
            for (std::size_t l = 0; l < 4; ++l) out[i + l] = std::exp(in[i + l]);
        } else {
            _mm256_storeu_pd(out + i, vexp4(x));
        }
    }
    for (; i < n; ++i) out[i] = std::exp(in[i]);
}

void matmul_nn_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b + l * n;
            const __m256d va = _mm256_set1_pd(av);
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vc = _mm256_loadu_pd(crow + j);
                vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
                _mm256_storeu_pd(crow + j, vc);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            __m256d acc = _mm256_setzero_pd();
            std::size_t l = 0;
            for (; l + 4 <= k; l += 4)
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + l), _mm256_loadu_pd(brow + l), acc);
            double s = hsum(acc);
            for (; l < k; ++l) s += arow[l] * brow[l];
            crow[j] = s;
        }
    }
}

void matmul_tn_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t l = 0; l < k; ++l) {
        const double* arow = a + l * m;
        const double* brow = b + l * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = c + i * n;
            const __m256d va = _mm256_set1_pd(av);
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vc = _mm256_loadu_pd(crow + j);
                vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
                _mm256_storeu_pd(crow + j, vc);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void row_sums_avx2(const double* a, double* out, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* arow = a + i * cols;
        __m256d acc = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(arow + j));
        double s = hsum(acc);
        for (; j < cols; ++j) s += arow[j];
        out[i] = s;
    }
}

void scale_rows_avx2(double* a, const double* s, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        double* arow = a + i * cols;
        const __m256d vs = _mm256_set1_pd(s[i]);
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4)
            _mm256_storeu_pd(arow + j, _mm256_mul_pd(vs, _mm256_loadu_pd(arow + j)));
        for (; j < cols; ++j) arow[j] *= s[i];
    }
}

void axpby_avx2(double alpha, const double* x, double beta, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

} // namespace

const Ops* avx2_ops() {
    static const Ops table{exp_array_avx2, matmul_nn_avx2, matmul_nt_avx2, matmul_tn_avx2,
                           row_sums_avx2,  scale_rows_avx2, axpby_avx2,    dot_avx2};
    return &table;
}

} // namespace sympdyn::kernels
