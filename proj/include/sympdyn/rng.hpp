#pragma once

#include <cstdint>

#include "sympdyn/matrix.hpp"

namespace sympdyn {

// Counter-based splittable generator: output k of stream s under seed q is
// splitmix64_mix(key(q, s) + k * golden). Two generators with the same
// (seed, stream) produce identical sequences regardless of interleaving,
// so parallel batches stay reproducible.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    CounterRng split(std::uint64_t stream) const { return CounterRng(seed_, stream); }

    std::uint64_t next_u64();
    double uniform();      // [0, 1)
    double uniform_open(); // (0, 1]
    double uniform(double lo, double hi);
    double normal(); // standard Gaussian, Box-Muller
    double gamma(double shape); // Marsaglia-Tsang, shape >= 1
    double chi_square(double dof);

private:
    std::uint64_t seed_, key_, counter_ = 0;
};

Matrix gaussian_matrix(CounterRng& rng, std::size_t rows, std::size_t cols, double scale = 1.0);

// Random orthogonal matrix via Gram-Schmidt on a Gaussian draw.
Matrix random_orthogonal(CounterRng& rng, std::size_t n);

} // namespace sympdyn
