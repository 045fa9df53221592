#include "sympdyn/instances.hpp"

namespace sympdyn {

AttentionWeights shared_basis_weights(CounterRng& rng, std::size_t d, double scale, double lo,
                                      double hi) {
    const Matrix q = random_orthogonal(rng, d);
    std::vector<double> la(d), mu(d);
    for (std::size_t i = 0; i < d; ++i) la[i] = rng.uniform(lo, hi) * scale;
    for (std::size_t i = 0; i < d; ++i) mu[i] = rng.uniform(lo, hi) * scale;

    auto assemble = [&](const std::vector<double>& diag) {
        Matrix scaled = q;
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i) scaled(i, j) *= diag[j];
        Matrix m = mul_nt(scaled, q);
        m = 0.5 * (m + transpose(m));
        return m;
    };
    return AttentionWeights::from_matrices(assemble(la), assemble(mu));
}

Ensemble gaussian_ensemble(CounterRng& rng, std::size_t n, std::size_t d, double x_scale,
                           double y_scale, double t) {
    Matrix x = gaussian_matrix(rng, n, d, x_scale);
    Matrix y = y_scale == 0.0 ? Matrix(n, d) : gaussian_matrix(rng, n, d, y_scale);
    return Ensemble(std::move(x), std::move(y), t);
}

} // namespace sympdyn
