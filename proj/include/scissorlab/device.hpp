#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "scissorlab/analytic.hpp"
#include "scissorlab/circuit.hpp"
#include "scissorlab/measurement.hpp"

namespace scissorlab {

struct ScissorSpec {
    int order = 3;                    // 1, 2, 3 or 7; 2 = order-3 device fed two photons
    double gain = 1.0;
    int resource_photons = -1;        // < 0: equal to the order
    double resource_efficiency = 1.0; // loss right after resource preparation
    DetectorModel detector{};

    static ScissorSpec from_transmissivity(int order, double eta);
    double transmissivity() const { return transmissivity_from_gain(gain); }
    int resources() const;
    int device_order() const { return order == 2 ? 3 : order; }
    bool coherent_input_only() const { return order == 2 || resources() < device_order(); }
    void validate() const;
};

struct AcceptedPattern {
    ClickPattern clicks;    // over ScissorCircuit::detected_modes
    double heralded_phase;  // pattern heralds exp(i phase n) T psi; corrected by the inverse
};

struct ScissorCircuit {
    Circuit circuit;
    int order = 0;
    std::size_t input_mode = 0;
    std::size_t resource_mode = 1;
    std::size_t output_mode = 1;
    std::vector<std::size_t> detected_modes;
    int resource_photons = 0;
    std::vector<AcceptedPattern> patterns;
};

// Full linear-optical device. Orders 1, 3 and 7 (2 maps to the order-3
// network with two resource photons). The returned circuit's space is sized so
// that inputs up to `input_cutoff` photons evolve without truncation.
ScissorCircuit build_scissor_circuit(const ScissorSpec& spec, int input_cutoff = 12);

// Same network with explicit beamsplitter settings: t_a is the input
// beamsplitter (order 1 and 3 only; 1/2 in the standard device) and t_b the
// gain beamsplitter. Accepted patterns carry their heralded phases.
ScissorCircuit build_scissor_network(int order, double t_a, double t_b, int resource_photons,
                                     double resource_efficiency, int input_cutoff);

// --- photon-path expansion --------------------------------------------------

// Occupations packed 5 bits per mode (at most 12 modes, 31 photons per mode).
struct OccupationKey {
    static constexpr int kBits = 5;
    static constexpr int kMaxModes = 12;
    static constexpr int kMaxPhotons = (1 << kBits) - 1;
    static std::uint64_t encode(std::span<const int> occ);
    static int get(std::uint64_t key, std::size_t mode) {
        return static_cast<int>((key >> (kBits * mode)) & kMaxPhotons);
    }
    static std::uint64_t set(std::uint64_t key, std::size_t mode, int n) {
        key &= ~(static_cast<std::uint64_t>(kMaxPhotons) << (kBits * mode));
        return key | (static_cast<std::uint64_t>(n) << (kBits * mode));
    }
};

using SparseState = std::unordered_map<std::uint64_t, Complex>;

// Output Fock amplitudes of prod_i (sum_j U_ji a_j^dag)^{n_i} / sqrt(n_i!) |0>,
// dropping every branch where some mode j exceeds max_out[j].
SparseState propagate(const Matrix& transfer, std::span<const int> input,
                      std::span<const int> max_out);

// --- heralding --------------------------------------------------------------

// Completely positive map from the input mode to the output mode, one Kraus
// family per accepted pattern, phase corrections already applied. Kraus
// operators are (output_cutoff + 1) x (input_cutoff + 1).
struct HeraldingMap {
    int input_cutoff = 0;
    int output_cutoff = 0;
    std::vector<std::vector<Matrix>> kraus;

    std::size_t size() const;
    // Unnormalized output with `mode` replaced by the device output.
    DensityOperator apply(const DensityOperator& rho, std::size_t mode) const;
    DensityOperator apply(const PureState& psi, std::size_t mode) const;
    // Per-pattern heralding probabilities.
    std::vector<double> pattern_probabilities(const PureState& psi, std::size_t mode) const;
};

HeraldingMap heralding_map(const ScissorCircuit& device, const DetectorModel& detector,
                           int input_cutoff);
HeraldingMap heralding_map(const ScissorCircuit& device, const DetectorModel& detector,
                           int input_cutoff, std::span<const AcceptedPattern> patterns);

struct HeraldResult {
    DensityOperator state;               // normalized
    double probability = 0.0;            // summed over accepted patterns
    std::vector<double> pattern_probabilities;
    std::optional<PureState> pure;       // set when the output is pure
};

// Single-mode input. Throws ZeroProbability when the total probability < 1e-300.
HeraldResult run_heralded(const ScissorCircuit& device, const PureState& input,
                          const DetectorModel& detector);
HeraldResult run_heralded(const ScissorCircuit& device, const PureState& input,
                          std::span<const AcceptedPattern> patterns, const DetectorModel& detector);

// Same quantities from dense evolution of the whole network followed by
// detect(); independent of the expansion machinery. Orders 1 and 3 only.
HeraldResult simulate_dense(const ScissorCircuit& device, const PureState& input,
                            const DetectorModel& detector);
HeraldResult simulate_dense(const ScissorCircuit& device, const PureState& input,
                            std::span<const AcceptedPattern> patterns, const DetectorModel& detector);

// Unnormalized pure output of a single pattern with perfect PNR detection and a
// lossless device, before phase correction.
PureState herald_pattern(const ScissorCircuit& device, const PureState& input,
                         const ClickPattern& pattern);

}  // namespace scissorlab
