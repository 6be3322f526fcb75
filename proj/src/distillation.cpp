#include "scissorlab/distillation.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "scissorlab/channels.hpp"

namespace scissorlab {

namespace {

void check_inputs(double chi, double T, double g, int order) {
    if (!(chi >= 0.0 && chi < 1.0))
        throw ParameterOutOfRange(fmt::format("EPR parameter {} outside [0, 1)", chi));
    if (!(T >= 0.0 && T <= 1.0))
        throw ParameterOutOfRange(fmt::format("channel transmissivity {} outside [0, 1]", T));
    if (!(g > 0.0)) throw ParameterOutOfRange(fmt::format("gain {} must be positive", g));
    if (order != 1 && order != 3)
        throw UnsupportedOrder(fmt::format("closed form exists for orders 1 and 3, not {}", order));
}

// Amplitude of |n, n-k> in branch k (n runs over k..k+order).
double branch_amplitude(double chi, double T, double g, int order, int k, int n) {
    double pre = order == 1 ? std::sqrt((1.0 - chi * chi) / (2.0 * (g * g + 1.0)))
                            : std::sqrt(6.0) / 8.0 *
                                  std::sqrt((1.0 - chi * chi) / std::pow(g * g + 1.0, 3));
    double loss = std::pow(1.0 - T, 0.5 * k) * std::pow(T, 0.5 * (n - k));
    double a = pre * std::pow(chi, n) * std::pow(g, n - k) * std::sqrt(binomial(n, k)) * loss;
    // the single-photon form carries (-chi)^n
    if (order == 1 && (n % 2 == 1)) a = -a;
    return a;
}

double branch_weight(double chi, double T, double g, int order, int k) {
    double w = 0.0;
    for (int n = k; n <= k + order; ++n) {
        double a = branch_amplitude(chi, T, g, order, k, n);
        w += a * a;
    }
    return w;
}

double tail_weight(double chi, double T, double g, int order, int k_max) {
    double tail = 0.0;
    for (int k = k_max + 1; k < k_max + 10000; ++k) {
        double w = branch_weight(chi, T, g, order, k);
        tail += w;
        if (w <= 1e-20 * tail || w == 0.0) break;
    }
    return tail;
}

}  // namespace

int epr_branch_cutoff(double chi, double T, double g, int order, double tol) {
    check_inputs(chi, T, g, order);
    const double total = tail_weight(chi, T, g, order, -1);
    for (int k = 0; k < 10000; ++k)
        if (tail_weight(chi, T, g, order, k) < tol * total) return k;
    throw CutoffTooSmall("EPR branch series does not converge", 1.0);
}

DensityOperator epr_scissor_state(double chi, double T, double g, int order, int k_max) {
    check_inputs(chi, T, g, order);
    if (k_max < 0) throw ParameterOutOfRange("k_max must be non-negative");
    // relative to the heralding probability, which can be tiny at high gain
    double tail = tail_weight(chi, T, g, order, k_max) / tail_weight(chi, T, g, order, -1);
    if (tail > 1e-10)
        throw CutoffTooSmall(fmt::format("branches beyond k_max={} carry a fraction {:.3g}", k_max, tail), tail);
    const int cutoff = k_max + order;
    auto space = FockSpace::uniform(2, cutoff);
    auto rho = DensityOperator::zero(space);
    for (int k = 0; k <= k_max; ++k) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
        for (int n = k; n <= k + order; ++n)
            v[static_cast<Eigen::Index>(space.index(std::array{n, n - k}))] =
                branch_amplitude(chi, T, g, order, k, n);
        rho.add_projector(PureState(space, std::move(v)));
    }
    return rho;
}

DensityOperator epr_scissor_pipeline(double chi, double T, double g, int order, int cutoff,
                                     Sign sign) {
    check_inputs(chi, T, g, order);
    PureState epr = epr_state(chi, cutoff);
    auto rho = DensityOperator::zero(epr.space());
    for (const auto& branch : loss_on_kraus_branches(epr, 1, T).branches) {
        PureState out = order == 1 ? t1_apply(branch, g, sign, 1).state : t3_apply(branch, g, 1).state;
        rho.add_projector(out);
    }
    return rho;
}

DensityOperator epr_device_state(double chi, double T, const ScissorSpec& spec, int cutoff) {
    auto device = build_scissor_circuit(spec, cutoff);
    auto map = heralding_map(device, spec.detector, cutoff);
    DensityOperator lossy = pure_loss(epr_state(chi, cutoff), 1, T);
    return map.apply(lossy, 1);
}

}  // namespace scissorlab
