#pragma once

#include <functional>
#include <vector>

#include "triage/orchestrator/plugin.hpp"
#include "triage/sim/scenario.hpp"

namespace triage::sim {

/// Ground truth of the casualty in front of the assessing robot, or nullptr
/// when there is none.
using SubjectLookup = std::function<const CasualtyTruth*(const orchestrator::AssessmentRequest&)>;

/// Simulated assessment plugins. Vitals plugins synthesize a trace from the
/// subject's true rates and run the real estimator on it; classifier plugins
/// report each true label with probability `classifier_accuracy`. All draws
/// are seeded from (scenario seed, plugin, casualty, trigger time).
std::vector<orchestrator::PluginConfig> make_sim_plugins(const Scenario& scenario, SubjectLookup subject);

}  // namespace triage::sim
