#pragma once

#include "scissorlab/fock.hpp"

namespace scissorlab {

// Unnormalized heralded output together with the success probability that
// accounts for every accepted (phase-corrected) click pattern.
struct Transformed {
    PureState state;
    double probability;
};

enum class Sign { Plus, Minus };

double gain_from_transmissivity(double eta);  // g = sqrt(eta / (1 - eta))
double transmissivity_from_gain(double g);    // eta = g^2 / (1 + g^2)

struct NlaSpec {
    int N = 1;
    double gain = 1.0;
    void validate() const;
};

// c_n -> g^n c_n on `mode`. Throws CutoffTooSmall if amplification pushes more
// than `tol` of the (relative) population into the top Fock level.
PureState ideal_nla(const PureState& psi, double g, std::size_t mode = 0,
                    double tol = kTruncationTolerance);

// sqrt(1/(2(g^2+1))) (c_0|0> +- g c_1|1>);  P = 2 ||.||^2 (both patterns kept).
Transformed t1_apply(const PureState& psi, double g, Sign sign = Sign::Plus, std::size_t mode = 0);

// sqrt(6)/8 (1/(g^2+1))^{3/2} sum_{n<=3} g^n c_n |n>;  P = 4 ||.||^2.
Transformed t3_apply(const PureState& psi, double g, std::size_t mode = 0);

// Two-photon resource through the three-photon device, coherent input only:
// gamma sqrt(2)/8 (1/(g^2+1)) e^{-|gamma|^2/2} (|0> + g gamma|1> + g^2 gamma^2/sqrt2 |2>);
// P = 4 ||.||^2.
Transformed t2_coherent(const FockSpace& space, Complex gamma, double g, std::size_t mode = 0);

// N single-photon scissors in parallel with feed-forward:
// (1/(g^2+1))^{N/2} sum_{n<=N} N!/((N-n)! N^n) g^n c_n |n>;  P = ||.||^2.
Transformed tN_parallel(const PureState& psi, double g, int N, std::size_t mode = 0);
Transformed tN_parallel(const PureState& psi, const NlaSpec& spec, std::size_t mode = 0);

// Diagonal single-mode operator of the transforms above (for density operators).
Matrix t1_operator(int cutoff, double g, Sign sign = Sign::Plus);
Matrix t3_operator(int cutoff, double g);
Matrix tN_operator(int cutoff, double g, int N);

}  // namespace scissorlab
