#pragma once

#include <array>

#include "scissorlab/device.hpp"

namespace scissorlab {

// Coherent amplitudes of the five output modes for the branch fed by the cat
// lobe beta i^k, with beta = alpha sqrt(T_A / ((1 - T_A)(1 - T_B))).
struct TeleampBranch {
    Complex B, A, C, A_prime, C_prime;
};

std::array<TeleampBranch, 4> teleamp_amplitudes(Complex gamma, Complex alpha, double t_a, double t_b);

Complex beta_from_alpha(Complex alpha, double t_a, double t_b);
Complex alpha_from_beta(Complex beta, double t_a, double t_b);
// g = sqrt(T_A T_B / ((1 - T_A)(1 - T_B)))
double teleamp_gain(double t_a, double t_b);

// Heralded output mode when the resource port of a lossless `device` is fed the
// cat state sum_k w^{-rk}|beta w^k> (w = exp(2 pi i / lobes)) instead of a Fock
// state, and the input is the coherent state |gamma>. Evaluated exactly by
// summing each residue class, so it stays accurate as beta -> 0.
PureState cat_teleamplify(const ScissorCircuit& device, const FockSpace& out, Complex gamma,
                          Complex beta, int lobes, int residue, const ClickPattern& pattern);

// Odd two-lobe cat through the single-photon network; pattern over (A, C).
// probability is the single-pattern heralding probability.
Transformed teleamp_2cat(const FockSpace& out, Complex gamma, Complex beta, double t_a, double t_b,
                         const ClickPattern& pattern = {0, 1});

// Four-lobe cat (residue 3 -> |3> as beta -> 0) through the three-photon
// network; pattern over (A, A', C, C').
Transformed teleamp_4cat(const FockSpace& out, Complex gamma, Complex beta, double t_a, double t_b,
                         int residue = 3, const ClickPattern& pattern = {0, 1, 1, 1});

}  // namespace scissorlab
