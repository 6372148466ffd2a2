#include "triage/orchestrator/plugin.hpp"

#include <algorithm>
#include <exception>
#include <set>

namespace triage::orchestrator {

const std::vector<std::string>& classifier_fields() {
  static const std::vector<std::string> fields{
      field::kTraumaHead,       field::kTraumaTorso,          field::kTraumaUpper,
      field::kTraumaLower,      field::kSevereHemorrhage,     field::kRespiratoryDistress,
      field::kAlertOcular,      field::kAlertVerbal,          field::kAlertMotor};
  return fields;
}

Registry Registry::configure(const std::vector<PluginConfig>& configs) {
  Registry reg;
  std::set<std::string> seen;
  for (const auto& c : configs) {
    const auto& d = c.descriptor;
    if (!seen.insert(d.name).second) {
      throw DuplicatePlugin(d.name);
    }
    if (!(d.timeout > 0.0)) {
      throw OrchestratorError("plugin '" + d.name + "' timeout must be positive");
    }
    if (!c.run) {
      throw OrchestratorError("plugin '" + d.name + "' has no function");
    }
    if (d.enabled) {
      reg.plugins_.push_back(c);
    }
  }
  return reg;
}

bool Registry::contains(const std::string& name) const {
  return std::any_of(plugins_.begin(), plugins_.end(),
                     [&](const PluginConfig& c) { return c.descriptor.name == name; });
}

std::vector<PluginResult> run_assessment(const AssessmentRequest& request, const Registry& registry,
                                         const geoloc::CasualtyMap& map) {
  if (!map.contains(request.casualty_id)) {
    throw UnknownCasualty(request.casualty_id);
  }
  std::vector<PluginResult> results;
  results.reserve(registry.size());
  for (const auto& plugin : registry.plugins()) {
    const auto& d = plugin.descriptor;
    PluginResult r;
    r.plugin = d.name;
    try {
      PluginOutput out = plugin.run(request);
      if (!(out.elapsed <= d.timeout)) {
        r.elapsed = d.timeout;
        r.error = "timeout";
      } else {
        r.elapsed = std::max(0.0, out.elapsed);
        r.completed = true;
        for (auto& [key, value] : out.values) {
          if (std::find(d.produces.begin(), d.produces.end(), key) != d.produces.end()) {
            r.values.emplace(key, std::move(value));
          }
        }
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

double assessment_duration(const std::vector<PluginResult>& results) {
  double d = 0.0;
  for (const auto& r : results) {
    d = std::max(d, r.elapsed);
  }
  return d;
}

}  // namespace triage::orchestrator
