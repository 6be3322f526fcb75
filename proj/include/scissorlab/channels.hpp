#pragma once

#include <vector>

#include "scissorlab/fock.hpp"

namespace scissorlab {

// Pure loss of power transmissivity tau (beamsplitter coupling to vacuum).
class LossChannel {
public:
    explicit LossChannel(double transmissivity);
    double transmissivity() const { return tau_; }
    // K_k |n> = sqrt(C(n,k) tau^{n-k} (1-tau)^k) |n-k>,  k = 0..cutoff
    std::vector<Matrix> kraus(int cutoff) const;
    Matrix kraus(int cutoff, int k) const;

private:
    double tau_;
};

DensityOperator pure_loss(const PureState& psi, std::size_t mode, double tau);
DensityOperator pure_loss(const DensityOperator& rho, std::size_t mode, double tau);

struct KrausBranches {
    std::vector<PureState> branches;  // |psi_k> for k = 0..k_max, unnormalized
    double residual = 0.0;            // norm^2 not captured by the listed branches
};

// k_max < 0 means exhaustive (k_max = cutoff of the mode).
KrausBranches loss_on_kraus_branches(const PureState& psi, std::size_t mode, double tau,
                                     int k_max = -1);

}  // namespace scissorlab
