#pragma once

#include <vector>

#include "triage/geoloc/casualty_map.hpp"
#include "triage/meshsync/store.hpp"
#include "triage/orchestrator/fusion.hpp"
#include "triage/orchestrator/plugin.hpp"
#include "triage/orchestrator/scorecard.hpp"

namespace triage::orchestrator {

/// Results collected for one trigger, not yet turned into a scorecard.
struct PendingAssessment {
  AssessmentRequest request;
  std::vector<PluginResult> results;
  /// Simulated time at which the last result is in.
  double completes_at{0.0};
};

/// Holds the full plugin configuration, derives the registry from the
/// enabled flags and is the only writer of scorecards to its store.
class Orchestrator {
 public:
  Orchestrator(std::vector<PluginConfig> configs, Mode mode);

  Mode mode() const { return mode_; }
  const Registry& registry() const { return registry_; }
  std::vector<PluginDescriptor> descriptors() const;

  /// Throws UnknownPlugin.
  void set_enabled(const std::string& name, bool enabled);
  bool enabled(const std::string& name) const;

  /// Runs the registered plugins. Throws UnknownCasualty.
  PendingAssessment start(const AssessmentRequest& request, const geoloc::CasualtyMap& map) const;

  /// Fuses the pending results into a scorecard and writes it to `store`
  /// as one new record on the scorecard stream.
  Scorecard build_scorecard(const PendingAssessment& pending, const geoloc::CasualtyMap& map, bool manikin,
                            meshsync::Store& store) const;

 private:
  std::vector<PluginConfig> configs_;
  Mode mode_;
  Registry registry_;
};

}  // namespace triage::orchestrator
