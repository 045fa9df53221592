#pragma once

#include <cstdint>

#include "sympdyn/core.hpp"
#include "sympdyn/rng.hpp"

namespace sympdyn {

// Seeded (A, V) pair sharing a random eigenbasis, eigenvalues uniform in
// [lo, hi] * scale. B = V A^{-1} is then symmetric positive definite, which
// the softmax Hamiltonian structure requires.
AttentionWeights shared_basis_weights(CounterRng& rng, std::size_t d, double scale,
                                      double lo = 0.3, double hi = 1.0);

// Positions scaled-Gaussian, momenta zero (or scaled-Gaussian when y_scale > 0).
Ensemble gaussian_ensemble(CounterRng& rng, std::size_t n, std::size_t d, double x_scale,
                           double y_scale = 0.0, double t = 0.0);

} // namespace sympdyn
