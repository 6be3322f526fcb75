#include "scissorlab/channels.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace scissorlab {

LossChannel::LossChannel(double transmissivity) : tau_(transmissivity) {
    if (!(tau_ >= 0.0 && tau_ <= 1.0))
        throw ParameterOutOfRange(fmt::format("loss transmissivity {} outside [0, 1]", tau_));
}

Matrix LossChannel::kraus(int cutoff, int k) const {
    Matrix K = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int n = k; n <= cutoff; ++n) {
        double w = binomial(n, k) * std::pow(tau_, n - k) * std::pow(1.0 - tau_, k);
        K(n - k, n) = std::sqrt(w);
    }
    return K;
}

std::vector<Matrix> LossChannel::kraus(int cutoff) const {
    std::vector<Matrix> ops;
    for (int k = 0; k <= cutoff; ++k) ops.push_back(kraus(cutoff, k));
    return ops;
}

DensityOperator pure_loss(const PureState& psi, std::size_t mode, double tau) {
    return pure_loss(to_density(psi), mode, tau);
}

DensityOperator pure_loss(const DensityOperator& rho, std::size_t mode, double tau) {
    LossChannel ch(tau);
    int cutoff = rho.space().cutoff(mode);
    if (tau == 1.0) return rho;
    auto out = DensityOperator::zero(rho.space());
    for (int k = 0; k <= cutoff; ++k) out.add(apply_local(rho, mode, ch.kraus(cutoff, k)));
    return out;
}

KrausBranches loss_on_kraus_branches(const PureState& psi, std::size_t mode, double tau,
                                     int k_max) {
    LossChannel ch(tau);
    int cutoff = psi.space().cutoff(mode);
    if (k_max < 0) k_max = cutoff;
    if (k_max > cutoff)
        throw ParameterOutOfRange(fmt::format("k_max {} exceeds cutoff {}", k_max, cutoff));
    KrausBranches out;
    double captured = 0.0;
    int last = tau == 1.0 ? 0 : k_max;
    for (int k = 0; k <= last; ++k) {
        out.branches.push_back(apply_local(psi, mode, ch.kraus(cutoff, k)));
        captured += out.branches.back().norm_sq();
    }
    out.residual = std::max(0.0, psi.norm_sq() - captured);
    return out;
}

}  // namespace scissorlab
