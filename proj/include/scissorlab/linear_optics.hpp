#pragma once

#include "scissorlab/fock.hpp"

namespace scissorlab {

// Coherent amplitudes map (u, v) -> (sqrt(T) u + sqrt(1-T) v, sqrt(T) v - sqrt(1-T) u),
// i.e. exp(theta (a^dag b - a b^dag)) with theta = arccos sqrt(T). Population
// that would exceed a cutoff is dropped (see truncation_leakage).
PureState apply_beamsplitter(const PureState& psi, std::size_t m1, std::size_t m2, double T);

// |n>_m -> exp(i n theta) |n>_m
PureState apply_phase(const PureState& psi, std::size_t mode, double theta);

double beamsplitter_angle(double T);

// <m, N-m| U |n, N-n> for fixed total N, indexed (m, n).
Matrix beamsplitter_block(int total, double T);

// 2x2 coherent-amplitude map of the beamsplitter acting on (first, second).
Eigen::Matrix2d beamsplitter_mixing(double T);

}  // namespace scissorlab
