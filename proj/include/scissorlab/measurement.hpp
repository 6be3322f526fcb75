#pragma once

#include <span>
#include <vector>

#include "scissorlab/fock.hpp"

namespace scissorlab {

enum class DetectorKind { PNR, OnOff };

// A lossy channel of transmissivity `efficiency` followed by an ideal detector.
struct DetectorModel {
    DetectorKind kind = DetectorKind::PNR;
    double efficiency = 1.0;

    static DetectorModel pnr(double efficiency = 1.0) { return {DetectorKind::PNR, efficiency}; }
    static DetectorModel on_off(double efficiency = 1.0) { return {DetectorKind::OnOff, efficiency}; }

    void validate() const;
    bool perfect_pnr() const { return kind == DetectorKind::PNR && efficiency == 1.0; }
    // POVM diagonal: probability that n photons on the mode yield `outcome`
    // (a count for PNR; 0 = off, nonzero = on for on-off).
    double weight(int photons, int outcome) const;
    bool operator==(const DetectorModel&) const = default;
};

enum class Click { Off = 0, On = 1 };

// One entry per measured mode: a photon count (PNR) or 0/1 (on-off).
using ClickPattern = std::vector<int>;

struct HeraldedPure {
    PureState state;  // unnormalized, measured modes removed
    double probability;
};

struct Heralded {
    DensityOperator state;  // unnormalized, measured modes removed
    double probability;
};

HeraldedPure project_pnr(const PureState& psi, std::size_t mode, int n);
Heralded project_pnr(const DensityOperator& rho, std::size_t mode, int n);
Heralded measure_on_off(const DensityOperator& rho, std::size_t mode, Click outcome);
Heralded measure_on_off(const PureState& psi, std::size_t mode, Click outcome);

Heralded detect(const PureState& psi, std::span<const std::size_t> modes,
                const ClickPattern& pattern, const DetectorModel& model);
Heralded detect(const DensityOperator& rho, std::span<const std::size_t> modes,
                const ClickPattern& pattern, const DetectorModel& model);

}  // namespace scissorlab
