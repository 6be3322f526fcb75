#include "scissorlab/analytic.hpp"

#include <cmath>

#include <fmt/format.h>

namespace scissorlab {

namespace {

void check_gain(double g) {
    if (!(g > 0.0) || !std::isfinite(g))
        throw ParameterOutOfRange(fmt::format("gain {} must be positive and finite", g));
}

}  // namespace

double gain_from_transmissivity(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw ParameterOutOfRange(fmt::format("gain transmissivity {} outside (0, 1)", eta));
    return std::sqrt(eta / (1.0 - eta));
}

double transmissivity_from_gain(double g) {
    check_gain(g);
    return g * g / (1.0 + g * g);
}

void NlaSpec::validate() const {
    if (N < 1) throw ParameterOutOfRange(fmt::format("NLA needs N >= 1, got {}", N));
    check_gain(gain);
}

PureState ideal_nla(const PureState& psi, double g, std::size_t mode, double tol) {
    check_gain(g);
    int c = psi.space().cutoff(mode);
    Matrix d = Matrix::Zero(c + 1, c + 1);
    for (int n = 0; n <= c; ++n) d(n, n) = std::pow(g, n);
    PureState out = apply_local(psi, mode, d);
    if (g > 1.0) {
        double total = out.norm_sq();
        double top = 0.0;
        const auto& sp = out.space();
        for (std::size_t i = 0; i < sp.dim(); ++i)
            if (sp.digit(i, mode) == c) top += std::norm(out[i]);
        if (total > 0.0 && top / total > tol)
            throw CutoffTooSmall(
                fmt::format("amplified state puts {:.3g} of its weight on the cutoff", top / total),
                top / total);
    }
    return out;
}

Matrix t1_operator(int cutoff, double g, Sign sign) {
    check_gain(g);
    Matrix d = Matrix::Zero(cutoff + 1, cutoff + 1);
    double pre = std::sqrt(1.0 / (2.0 * (g * g + 1.0)));
    d(0, 0) = pre;
    d(1, 1) = (sign == Sign::Plus ? 1.0 : -1.0) * g * pre;
    return d;
}

Matrix t3_operator(int cutoff, double g) {
    check_gain(g);
    Matrix d = Matrix::Zero(cutoff + 1, cutoff + 1);
    double pre = std::sqrt(6.0) / 8.0 * std::pow(1.0 / (g * g + 1.0), 1.5);
    for (int n = 0; n <= std::min(3, cutoff); ++n) d(n, n) = pre * std::pow(g, n);
    return d;
}

Matrix tN_operator(int cutoff, double g, int N) {
    NlaSpec{N, g}.validate();
    Matrix d = Matrix::Zero(cutoff + 1, cutoff + 1);
    double pre = std::pow(1.0 / (g * g + 1.0), 0.5 * N);
    for (int n = 0; n <= std::min(N, cutoff); ++n) {
        double distortion = std::exp(log_factorial(N) - log_factorial(N - n)) / std::pow(N, n);
        d(n, n) = pre * distortion * std::pow(g, n);
    }
    return d;
}

Transformed t1_apply(const PureState& psi, double g, Sign sign, std::size_t mode) {
    PureState out = apply_local(psi, mode, t1_operator(psi.space().cutoff(mode), g, sign));
    double p = 2.0 * out.norm_sq();
    return {std::move(out), p};
}

Transformed t3_apply(const PureState& psi, double g, std::size_t mode) {
    PureState out = apply_local(psi, mode, t3_operator(psi.space().cutoff(mode), g));
    double p = 4.0 * out.norm_sq();
    return {std::move(out), p};
}

Transformed t2_coherent(const FockSpace& space, Complex gamma, double g, std::size_t mode) {
    check_gain(g);
    int c = space.cutoff(mode);
    Complex pre = gamma * (std::sqrt(2.0) / 8.0) * (1.0 / (g * g + 1.0)) *
                  std::exp(-0.5 * std::norm(gamma));
    Vector amps = Vector::Zero(c + 1);
    Complex coeff[3] = {1.0, g * gamma, g * g * gamma * gamma / std::sqrt(2.0)};
    for (int n = 0; n <= std::min(2, c); ++n) amps[n] = pre * coeff[n];
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    for (int n = 0; n <= c; ++n) v[n * static_cast<Eigen::Index>(space.stride(mode))] = amps[n];
    PureState out(space, std::move(v));
    double p = 4.0 * out.norm_sq();
    return {std::move(out), p};
}

Transformed tN_parallel(const PureState& psi, double g, int N, std::size_t mode) {
    PureState out = apply_local(psi, mode, tN_operator(psi.space().cutoff(mode), g, N));
    double p = out.norm_sq();
    return {std::move(out), p};
}

Transformed tN_parallel(const PureState& psi, const NlaSpec& spec, std::size_t mode) {
    return tN_parallel(psi, spec.gain, spec.N, mode);
}

}  // namespace scissorlab
