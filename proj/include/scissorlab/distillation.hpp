#pragma once

#include "scissorlab/analytic.hpp"
#include "scissorlab/device.hpp"

namespace scissorlab {

// Closed-form rho_AB = sum_k |psi_k><psi_k| for an EPR state whose second arm
// passes a pure-loss channel (transmissivity T) and then an ideal scissor of
// order 1 or 3 (one click pattern; trace = that pattern's probability).
// Both modes get cutoff k_max + order. Throws CutoffTooSmall when the branches
// beyond k_max carry more than a fraction 1e-10 of the trace.
DensityOperator epr_scissor_state(double chi, double T, double g, int order, int k_max);

// Smallest k_max for which epr_scissor_state omits less than a fraction tol of the trace.
int epr_branch_cutoff(double chi, double T, double g, int order, double tol = 1e-10);

// Generic route: epr_state -> loss_on_kraus_branches -> analytic scissor on
// each branch. `sign` selects the single-photon scissor's click pattern.
DensityOperator epr_scissor_pipeline(double chi, double T, double g, int order, int cutoff,
                                     Sign sign = Sign::Minus);

// EPR -> loss -> full device model (resource loss, detector model); mode 1 is
// replaced by the device output. Unnormalized; trace = heralding probability.
DensityOperator epr_device_state(double chi, double T, const ScissorSpec& spec, int cutoff);

}  // namespace scissorlab
