#include "triage/orchestrator/orchestrator.hpp"

#include <algorithm>

namespace triage::orchestrator {

Orchestrator::Orchestrator(std::vector<PluginConfig> configs, Mode mode)
    : configs_(std::move(configs)), mode_(mode), registry_(Registry::configure(configs_)) {}

std::vector<PluginDescriptor> Orchestrator::descriptors() const {
  std::vector<PluginDescriptor> out;
  out.reserve(configs_.size());
  for (const auto& c : configs_) {
    out.push_back(c.descriptor);
  }
  return out;
}

void Orchestrator::set_enabled(const std::string& name, bool enabled) {
  const auto it = std::find_if(configs_.begin(), configs_.end(),
                               [&](const PluginConfig& c) { return c.descriptor.name == name; });
  if (it == configs_.end()) {
    throw UnknownPlugin(name);
  }
  it->descriptor.enabled = enabled;
  registry_ = Registry::configure(configs_);
}

bool Orchestrator::enabled(const std::string& name) const { return registry_.contains(name); }

PendingAssessment Orchestrator::start(const AssessmentRequest& request, const geoloc::CasualtyMap& map) const {
  PendingAssessment p;
  p.request = request;
  p.results = run_assessment(request, registry_, map);
  p.completes_at = request.trigger_time + assessment_duration(p.results);
  return p;
}

Scorecard Orchestrator::build_scorecard(const PendingAssessment& pending, const geoloc::CasualtyMap& map,
                                        bool manikin, meshsync::Store& store) const {
  const ScorecardContext ctx{pending.completes_at, pending.request.robot, manikin};
  Scorecard card = make_scorecard(pending.request.casualty_id, map, fuse_vitals(pending.results, mode_),
                                  collect_classifiers(pending.results), collect_descriptions(pending.results), ctx);
  store.put_local(kScorecardStream, canonical_json(card), pending.completes_at);
  return card;
}

}  // namespace triage::orchestrator
