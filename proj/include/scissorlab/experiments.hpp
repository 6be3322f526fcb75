#pragma once

#include <string>
#include <vector>

#include "scissorlab/config.hpp"
#include "scissorlab/report.hpp"

namespace scissorlab {

struct CheckResult {
    std::string name;
    std::string claim;
    bool passed = false;
    std::string detail;  // worst margin or first violation
};

struct ScenarioResult {
    Table table;
    std::vector<Panel> panels;
    std::vector<CheckResult> checks;  // only the checks enabled in the config
    bool passed() const;
};

ScenarioResult run_fig3(const SweepConfig& config);
ScenarioResult run_fig4(const SweepConfig& config);
ScenarioResult run_fig5(const SweepConfig& config);
ScenarioResult run_fig8(const SweepConfig& config);
ScenarioResult run_fig9(const SweepConfig& config);
ScenarioResult run_sweep(const SweepConfig& config);
ScenarioResult run_scenario(const SweepConfig& config);

}  // namespace scissorlab
