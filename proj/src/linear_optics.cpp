#include "scissorlab/linear_optics.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace scissorlab {

namespace {

void check_transmissivity(double T) {
    if (!(T >= 0.0 && T <= 1.0))
        throw ParameterOutOfRange(fmt::format("transmissivity {} outside [0, 1]", T));
}

}  // namespace

double beamsplitter_angle(double T) {
    check_transmissivity(T);
    return std::acos(std::sqrt(T));
}

Eigen::Matrix2d beamsplitter_mixing(double T) {
    check_transmissivity(T);
    double c = std::sqrt(T), s = std::sqrt(1.0 - T);
    Eigen::Matrix2d g;
    g << c, s, -s, c;
    return g;
}

Matrix beamsplitter_block(int total, double T) {
    check_transmissivity(T);
    const double c = std::sqrt(T), s = std::sqrt(1.0 - T);
    Matrix b = Matrix::Zero(total + 1, total + 1);
    for (int n1 = 0; n1 <= total; ++n1) {
        int n2 = total - n1;
        for (int m1 = 0; m1 <= total; ++m1) {
            int m2 = total - m1;
            // a1^dag -> c a1^dag - s a2^dag,  a2^dag -> s a1^dag + c a2^dag
            double sum = 0.0;
            for (int j = std::max(0, m1 - n2); j <= std::min(n1, m1); ++j) {
                double term = binomial(n1, j) * binomial(n2, m1 - j);
                term *= std::pow(c, j) * std::pow(-s, n1 - j) * std::pow(s, m1 - j) *
                        std::pow(c, n2 - m1 + j);
                sum += term;
            }
            double norm = std::exp(0.5 * (log_factorial(m1) + log_factorial(m2) -
                                          log_factorial(n1) - log_factorial(n2)));
            b(m1, n1) = sum * norm;
        }
    }
    return b;
}

PureState apply_beamsplitter(const PureState& psi, std::size_t m1, std::size_t m2, double T) {
    const auto& sp = psi.space();
    sp.check_mode(m1);
    sp.check_mode(m2);
    if (m1 == m2) throw ModeCollision(fmt::format("beamsplitter on mode {} twice", m1));
    check_transmissivity(T);

    const int c1 = sp.cutoffs()[m1], c2 = sp.cutoffs()[m2];
    const std::size_t s1 = sp.stride(m1), s2 = sp.stride(m2);
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(c1 + c2 + 1));
    for (int n = 0; n <= c1 + c2; ++n) blocks.push_back(beamsplitter_block(n, T));

    const Vector& in = psi.amplitudes();
    Vector out = Vector::Zero(in.size());
    for (std::size_t i = 0; i < sp.dim(); ++i) {
        Complex x = in[static_cast<Eigen::Index>(i)];
        if (x == Complex(0.0)) continue;
        int n1 = sp.digit(i, m1), n2 = sp.digit(i, m2);
        std::size_t base = i - n1 * s1 - n2 * s2;
        int total = n1 + n2;
        const Matrix& b = blocks[static_cast<std::size_t>(total)];
        for (int k = std::max(0, total - c2); k <= std::min(total, c1); ++k)
            out[static_cast<Eigen::Index>(base + k * s1 + (total - k) * s2)] += b(k, n1) * x;
    }
    return PureState(sp, std::move(out));
}

PureState apply_phase(const PureState& psi, std::size_t mode, double theta) {
    const auto& sp = psi.space();
    int c = sp.cutoff(mode);
    Matrix d = Matrix::Zero(c + 1, c + 1);
    for (int n = 0; n <= c; ++n) d(n, n) = std::polar(1.0, n * theta);
    return apply_local(psi, mode, d);
}

}  // namespace scissorlab
