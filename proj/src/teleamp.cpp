#include "scissorlab/teleamp.hpp"

#include <cmath>

#include <fmt/format.h>

namespace scissorlab {

namespace {

void check_open_unit(double t, const char* what) {
    if (!(t > 0.0 && t < 1.0))
        throw ParameterOutOfRange(fmt::format("{} {} outside (0, 1)", what, t));
}

}  // namespace

Complex beta_from_alpha(Complex alpha, double t_a, double t_b) {
    check_open_unit(t_a, "T_A");
    check_open_unit(t_b, "T_B");
    return alpha * std::sqrt(t_a / ((1.0 - t_a) * (1.0 - t_b)));
}

Complex alpha_from_beta(Complex beta, double t_a, double t_b) {
    return beta / beta_from_alpha(1.0, t_a, t_b);
}

double teleamp_gain(double t_a, double t_b) {
    check_open_unit(t_a, "T_A");
    check_open_unit(t_b, "T_B");
    return std::sqrt(t_a * t_b / ((1.0 - t_a) * (1.0 - t_b)));
}

std::array<TeleampBranch, 4> teleamp_amplitudes(Complex gamma, Complex alpha, double t_a,
                                                double t_b) {
    const Complex beta = beta_from_alpha(alpha, t_a, t_b);
    const Complex I(0.0, 1.0);
    const double ra = std::sqrt(t_a), rra = std::sqrt(1.0 - t_a);
    std::array<TeleampBranch, 4> out{};
    Complex ik = 1.0;
    for (int k = 0; k < 4; ++k, ik *= I) {
        Complex ak = alpha * ik;
        // after the gain and input beamsplitters
        Complex a1 = ra * (gamma - ak);
        Complex c1 = -rra * gamma - t_a * ak / rra;
        // A and C split 50:50 into A' and C'; pi/2 on A'; A' and C' recombined
        Complex ap = -I * a1 / std::sqrt(2.0), cp = -c1 / std::sqrt(2.0);
        out[k].B = std::sqrt(t_b) * beta * ik;
        out[k].A = a1 / std::sqrt(2.0);
        out[k].C = c1 / std::sqrt(2.0);
        out[k].A_prime = (ap + cp) / std::sqrt(2.0);
        out[k].C_prime = (cp - ap) / std::sqrt(2.0);
    }
    return out;
}

PureState cat_teleamplify(const ScissorCircuit& device, const FockSpace& out, Complex gamma,
                          Complex beta, int lobes, int residue, const ClickPattern& pattern) {
    if (!device.circuit.lossless()) throw ParameterOutOfRange("cat tele-amplification needs a lossless device");
    if (lobes < 1 || residue < 0 || residue >= lobes)
        throw ParameterOutOfRange(fmt::format("cat with {} lobes, residue {}", lobes, residue));
    if (out.num_modes() != 1) throw DimensionMismatch("output space must be single-mode");
    if (pattern.size() != device.detected_modes.size())
        throw DimensionMismatch("click pattern length differs from detected port count");
    if (std::norm(beta) == 0.0) throw DegenerateCat("cat resource with beta = 0");

    const Matrix U = device.circuit.transfer_matrix();
    const auto A = static_cast<Eigen::Index>(device.input_mode);
    const auto B = static_cast<Eigen::Index>(device.resource_mode);
    const auto O = static_cast<Eigen::Index>(device.output_mode);
    if (U(O, A) != Complex(0.0)) throw ParameterOutOfRange("input leaks into the output mode");
    if (device.detected_modes.size() + 1 != device.circuit.num_modes())
        throw ParameterOutOfRange("every non-output mode must be detected");

    // prod_j (U_jA gamma + U_jB y)^{c_j} / sqrt(c_j!) as a polynomial in y
    std::vector<Complex> poly{1.0};
    double log_norm = 0.0;
    for (std::size_t j = 0; j < pattern.size(); ++j) {
        const auto row = static_cast<Eigen::Index>(device.detected_modes[j]);
        Complex c0 = U(row, A) * gamma, c1 = U(row, B);
        for (int rep = 0; rep < pattern[j]; ++rep) {
            std::vector<Complex> next(poly.size() + 1, 0.0);
            for (std::size_t m = 0; m < poly.size(); ++m) {
                next[m] += poly[m] * c0;
                next[m + 1] += poly[m] * c1;
            }
            poly = std::move(next);
        }
        log_norm += 0.5 * log_factorial(pattern[j]);
    }

    // residue-class norm of the cat, sum_{l = r mod K} |beta|^{2l} / l!
    const double mb = std::abs(beta), lb = std::log(mb);
    double class_norm = 0.0;
    for (int l = residue;; l += lobes) {
        double term = std::exp(2.0 * l * lb - log_factorial(l));
        class_norm += term;
        if (l > mb * mb && term < 1e-18 * class_norm) break;
    }

    const int c = out.cutoff(0);
    const Complex u = U(O, B);
    Vector amps = Vector::Zero(c + 1);
    const double gauss = std::exp(-0.5 * std::norm(gamma) - log_norm) / std::sqrt(class_norm);
    for (int n = 0; n <= c; ++n) {
        Complex s = 0.0;
        for (std::size_t m = 0; m < poly.size(); ++m) {
            int e = static_cast<int>(m) + n;
            if ((e - residue) % lobes != 0) continue;
            s += poly[m] * std::pow(beta, e);
        }
        amps[n] = gauss * s * std::pow(u, n) * std::exp(-0.5 * log_factorial(n));
    }
    return PureState(out, std::move(amps));
}

Transformed teleamp_2cat(const FockSpace& out, Complex gamma, Complex beta, double t_a, double t_b,
                         const ClickPattern& pattern) {
    check_open_unit(t_a, "T_A");
    check_open_unit(t_b, "T_B");
    auto device = build_scissor_network(1, t_a, t_b, 1, 1.0, 1);
    PureState s = cat_teleamplify(device, out, gamma, beta, 2, 1, pattern);
    double p = s.norm_sq();
    return {std::move(s), p};
}

Transformed teleamp_4cat(const FockSpace& out, Complex gamma, Complex beta, double t_a, double t_b,
                         int residue, const ClickPattern& pattern) {
    check_open_unit(t_a, "T_A");
    check_open_unit(t_b, "T_B");
    auto device = build_scissor_network(3, t_a, t_b, 3, 1.0, 1);
    PureState s = cat_teleamplify(device, out, gamma, beta, 4, residue, pattern);
    double p = s.norm_sq();
    return {std::move(s), p};
}

}  // namespace scissorlab
