#include "sympdyn/rng.hpp"

#include <cmath>

#include "sympdyn/error.hpp"
#include "sympdyn/kernels.hpp"

namespace sympdyn {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), key_(mix64(seed ^ mix64(stream * kGolden + 0x6A09E667F3BCC909ull))) {}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double CounterRng::gamma(double shape) {
    if (shape < 1.0) throw DomainError("gamma: shape must be >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double CounterRng::chi_square(double dof) {
    if (dof < 2.0) throw DomainError("chi_square: dof must be >= 2");
    return 2.0 * gamma(0.5 * dof);
}

Matrix gaussian_matrix(CounterRng& rng, std::size_t rows, std::size_t cols, double scale) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
    return m;
}

Matrix random_orthogonal(CounterRng& rng, std::size_t n) {
    Matrix g = gaussian_matrix(rng, n, n);
    // modified Gram-Schmidt on columns
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += g(i, p) * g(i, j);
            for (std::size_t i = 0; i < n; ++i) g(i, j) -= proj * g(i, p);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += g(i, j) * g(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw SingularMatrixError("random_orthogonal: degenerate draw");
        for (std::size_t i = 0; i < n; ++i) g(i, j) /= norm;
    }
    return g;
}

} // namespace sympdyn
