#include "scissorlab/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace scissorlab {

void DetectorModel::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0))
        throw ParameterOutOfRange(fmt::format("detector efficiency {} outside [0, 1]", efficiency));
}

double DetectorModel::weight(int photons, int outcome) const {
    const double t = efficiency;
    if (kind == DetectorKind::OnOff) {
        double off = std::pow(1.0 - t, photons);
        return outcome == 0 ? off : 1.0 - off;
    }
    if (outcome < 0 || outcome > photons) return 0.0;
    return binomial(photons, outcome) * std::pow(t, outcome) * std::pow(1.0 - t, photons - outcome);
}

namespace {

// Index bookkeeping for splitting a space into measured and remaining modes.
struct Split {
    FockSpace rest;
    FockSpace measured;
    std::vector<std::size_t> modes;
    // full index of (rest index, measured index)
    std::vector<std::vector<Eigen::Index>> full;  // [measured][rest]

    Split(const FockSpace& sp, std::span<const std::size_t> ms)
        : rest(sp.without(ms)), measured(FockSpace::scalar()), modes(ms.begin(), ms.end()) {
        std::vector<int> mc;
        for (std::size_t j = 0; j < modes.size(); ++j) {
            sp.check_mode(modes[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (modes[k] == modes[j]) throw ModeCollision("mode measured twice");
            mc.push_back(sp.cutoffs()[modes[j]]);
        }
        if (!mc.empty()) measured = FockSpace(mc);
        std::vector<std::size_t> rest_modes;
        for (std::size_t m = 0; m < sp.num_modes(); ++m)
            if (std::find(modes.begin(), modes.end(), m) == modes.end()) rest_modes.push_back(m);
        full.assign(measured.dim(), std::vector<Eigen::Index>(rest.dim()));
        for (std::size_t t = 0; t < measured.dim(); ++t)
            for (std::size_t r = 0; r < rest.dim(); ++r) {
                std::size_t idx = 0;
                for (std::size_t j = 0; j < modes.size(); ++j)
                    idx += static_cast<std::size_t>(measured.digit(t, j)) * sp.stride(modes[j]);
                for (std::size_t j = 0; j < rest_modes.size(); ++j)
                    idx += static_cast<std::size_t>(rest.digit(r, j)) * sp.stride(rest_modes[j]);
                full[t][r] = static_cast<Eigen::Index>(idx);
            }
    }

    double weight(std::size_t t, const ClickPattern& pattern, const DetectorModel& model) const {
        double w = 1.0;
        for (std::size_t j = 0; j < modes.size() && w > 0.0; ++j)
            w *= model.weight(measured.digit(t, j), pattern[j]);
        return w;
    }
};

void check_pattern(const Split& s, const ClickPattern& pattern, const DetectorModel& model) {
    model.validate();
    if (pattern.size() != s.modes.size())
        throw DimensionMismatch(fmt::format("click pattern has {} entries for {} measured modes",
                                            pattern.size(), s.modes.size()));
    for (std::size_t j = 0; j < pattern.size(); ++j) {
        if (pattern[j] < 0) throw OccupationOutOfRange("negative click count");
        if (model.kind == DetectorKind::PNR && pattern[j] > s.measured.cutoffs()[j])
            throw OccupationOutOfRange(fmt::format("count {} exceeds cutoff {} of measured mode",
                                                   pattern[j], s.measured.cutoffs()[j]));
    }
}

}  // namespace

HeraldedPure project_pnr(const PureState& psi, std::size_t mode, int n) {
    std::array<std::size_t, 1> ms{mode};
    Split s(psi.space(), ms);
    if (n < 0 || n > psi.space().cutoff(mode))
        throw OccupationOutOfRange(fmt::format("count {} exceeds cutoff {}", n, psi.space().cutoff(mode)));
    Vector v(static_cast<Eigen::Index>(s.rest.dim()));
    const auto& rows = s.full[static_cast<std::size_t>(n)];
    for (std::size_t r = 0; r < rows.size(); ++r)
        v[static_cast<Eigen::Index>(r)] = psi.amplitudes()[rows[r]];
    PureState out(s.rest, std::move(v));
    double p = out.norm_sq();
    return {std::move(out), p};
}

Heralded project_pnr(const DensityOperator& rho, std::size_t mode, int n) {
    std::array<std::size_t, 1> ms{mode};
    return detect(rho, ms, ClickPattern{n}, DetectorModel::pnr());
}

Heralded measure_on_off(const DensityOperator& rho, std::size_t mode, Click outcome) {
    std::array<std::size_t, 1> ms{mode};
    return detect(rho, ms, ClickPattern{static_cast<int>(outcome)}, DetectorModel::on_off());
}

Heralded measure_on_off(const PureState& psi, std::size_t mode, Click outcome) {
    std::array<std::size_t, 1> ms{mode};
    return detect(psi, ms, ClickPattern{static_cast<int>(outcome)}, DetectorModel::on_off());
}

Heralded detect(const PureState& psi, std::span<const std::size_t> modes,
                const ClickPattern& pattern, const DetectorModel& model) {
    Split s(psi.space(), modes);
    check_pattern(s, pattern, model);
    Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(s.rest.dim()),
                              static_cast<Eigen::Index>(s.rest.dim()));
    Vector v(static_cast<Eigen::Index>(s.rest.dim()));
    for (std::size_t t = 0; t < s.measured.dim(); ++t) {
        double w = s.weight(t, pattern, model);
        if (w == 0.0) continue;
        for (std::size_t r = 0; r < s.rest.dim(); ++r)
            v[static_cast<Eigen::Index>(r)] = psi.amplitudes()[s.full[t][r]];
        acc.noalias() += w * (v * v.adjoint());
    }
    DensityOperator rho(s.rest, std::move(acc));
    double p = rho.trace();
    return {std::move(rho), p};
}

Heralded detect(const DensityOperator& rho, std::span<const std::size_t> modes,
                const ClickPattern& pattern, const DetectorModel& model) {
    Split s(rho.space(), modes);
    check_pattern(s, pattern, model);
    Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(s.rest.dim()),
                              static_cast<Eigen::Index>(s.rest.dim()));
    for (std::size_t t = 0; t < s.measured.dim(); ++t) {
        double w = s.weight(t, pattern, model);
        if (w == 0.0) continue;
        acc += w * rho.matrix()(s.full[t], s.full[t]);
    }
    DensityOperator out(s.rest, std::move(acc));
    double p = out.trace();
    return {std::move(out), p};
}

}  // namespace scissorlab
