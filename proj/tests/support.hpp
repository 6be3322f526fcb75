#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "scissorlab/fock.hpp"

namespace scissorlab::testing {

// Normalized state with random complex amplitudes on occupations with every
// mode below `support` (inclusive).
inline PureState random_state(const FockSpace& space, std::mt19937_64& rng, int support = 1 << 20) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    for (std::size_t i = 0; i < space.dim(); ++i) {
        bool ok = true;
        for (std::size_t m = 0; m < space.num_modes(); ++m) ok = ok && space.digit(i, m) <= support;
        if (ok) v[static_cast<Eigen::Index>(i)] = Complex(n(rng), n(rng));
    }
    return PureState(space, v / v.norm());
}

inline DensityOperator random_mixed(const FockSpace& space, std::mt19937_64& rng, int rank = 3,
                                    int support = 1 << 20) {
    auto rho = DensityOperator::zero(space);
    for (int k = 0; k < rank; ++k) rho.add_projector(random_state(space, rng, support).scaled(1.0 / std::sqrt(rank)));
    return rho;
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Smallest space holding both, mode by mode.
inline FockSpace common_space(const FockSpace& a, const FockSpace& b) {
    std::vector<int> c(a.num_modes());
    for (std::size_t m = 0; m < c.size(); ++m) c[m] = std::max(a.cutoff(m), b.cutoff(m));
    return FockSpace(c);
}

inline double overlap_fidelity(const PureState& a, const PureState& b) {
    auto s = common_space(a.space(), b.space());
    return std::norm(embed(a, s).normalized().amplitudes().dot(embed(b, s).normalized().amplitudes()));
}

}  // namespace scissorlab::testing
