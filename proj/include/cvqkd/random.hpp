#pragma once

// Seeded random draws of Gaussian-unitary parameters for property checks.

#include "cvqkd/unitaries.hpp"

#include <random>

namespace cvqkd::rnd {

inline ComplexMatrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline ComplexMatrix hermitian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    const ComplexMatrix m = gaussian_matrix(rng, n, scale);
    return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix symmetric(std::mt19937_64& rng, Eigen::Index n, double scale = 0.5) {
    const ComplexMatrix m = gaussian_matrix(rng, n, scale);
    return 0.5 * (m + m.transpose());
}

inline ComplexVector vector(std::mt19937_64& rng, Eigen::Index n, double scale = 0.5) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v;
}

/// Rotation, squeezer, rotation with random parameters.
inline BogoliubovPair bogoliubov(std::mt19937_64& rng, Eigen::Index n, double squeeze_scale = 0.5) {
    std::vector<FundamentalOp> ops;
    ops.emplace_back(Rotation{hermitian(rng, n)});
    ops.emplace_back(Squeezer{symmetric(rng, n, squeeze_scale)});
    ops.emplace_back(Rotation{hermitian(rng, n)});
    return compose_circuit(ops, n);
}

}  // namespace cvqkd::rnd
