#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scissorlab/measurement.hpp"

namespace scissorlab {

enum class Scenario { Fig3, Fig4, Fig5, Fig8, Fig9, Sweep };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);  // ConfigError if unknown

struct GainGrid {
    double min = 1.0;
    double max = 10.0;
    int steps = 20;
    std::vector<double> values() const;  // evenly spaced, endpoints included
    bool operator==(const GainGrid&) const = default;
};

struct SweepConfig {
    Scenario scenario = Scenario::Fig3;
    GainGrid gain;
    std::vector<double> gamma;            // coherent input magnitudes
    std::vector<double> chi;              // EPR parameters
    std::vector<double> channel;          // loss-channel transmissivity T
    std::vector<double> tau_s;            // resource efficiency
    std::vector<double> tau_d;            // detector efficiency
    std::vector<DetectorKind> detectors;
    std::vector<int> orders;              // scissor orders
    std::vector<int> nla_sizes;           // N of the parallel single-photon NLA
    std::string input = "coherent";       // sweep only: coherent | epr
    int cutoff = 12;
    std::string output;                   // file stem; empty = scenario name
    std::vector<std::string> checks;      // enabled --check assertions

    static SweepConfig defaults(Scenario s);
    void validate() const;  // ConfigError
    std::string stem() const { return output.empty() ? scenario_name(scenario) : output; }
    bool operator==(const SweepConfig&) const = default;
};

// Names of the assertions a scenario knows about.
std::vector<std::string> available_checks(Scenario s);

// INI text with one [section] per scenario; the section matching `scenario` is
// applied on top of the defaults (absent section = defaults). Unknown sections
// or keys raise ConfigError. Comments start with ';'.
SweepConfig parse_config(const std::string& text, Scenario scenario);
SweepConfig load_config(const std::filesystem::path& path, Scenario scenario);

// Section text that parse_config reads back to an equal config.
std::string serialize(const SweepConfig& config);

}  // namespace scissorlab
