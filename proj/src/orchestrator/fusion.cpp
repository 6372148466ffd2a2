#include "triage/orchestrator/fusion.hpp"

namespace triage::orchestrator {

const char* to_string(Mode mode) { return mode == Mode::Year1 ? "year1" : "year2"; }

Mode mode_from_string(std::string_view name) {
  if (name == "year1") return Mode::Year1;
  if (name == "year2") return Mode::Year2;
  throw OrchestratorError("unknown mode '" + std::string(name) + "' (expected year1 or year2)");
}

namespace {

vitals::RateEstimate first_valid(const vitals::RateEstimate& primary, const vitals::RateEstimate& fallback) {
  if (primary.valid) return primary;
  if (fallback.valid) return fallback;
  return vitals::RateEstimate::invalid("");
}

// Estimate for `key` from a completed result of `plugin`, tagged with the
// plugin name; invalid when absent.
vitals::RateEstimate lookup(const std::vector<PluginResult>& results, const char* plugin, const char* key) {
  for (const auto& r : results) {
    if (r.plugin != plugin || !r.completed) continue;
    const auto it = r.values.find(key);
    if (it == r.values.end()) continue;
    if (const auto* est = std::get_if<vitals::RateEstimate>(&it->second)) {
      vitals::RateEstimate out = *est;
      out.source = plugin;
      return out;
    }
  }
  return vitals::RateEstimate::invalid(plugin);
}

}  // namespace

vitals::RateEstimate fuse_respiration_y2(const vitals::RateEstimate& lwir, const vitals::RateEstimate& mmwave) {
  return first_valid(lwir, mmwave);
}

vitals::RateEstimate fuse_respiration_y1(const vitals::RateEstimate& pcr, const vitals::RateEstimate& mtts) {
  return first_valid(pcr, mtts);
}

FusedVitals fuse_vitals(const std::vector<PluginResult>& results, Mode mode) {
  FusedVitals f;
  if (mode == Mode::Year2) {
    f.respiration = fuse_respiration_y2(lookup(results, plugin::kLwir, field::kRespiration),
                                        lookup(results, plugin::kMmwave, field::kRespiration));
    f.heart_rate = lookup(results, plugin::kMmwave, field::kHeartRate);
  } else {
    f.respiration = fuse_respiration_y1(lookup(results, plugin::kPcr, field::kRespiration),
                                        lookup(results, plugin::kMtts, field::kRespiration));
    f.heart_rate = lookup(results, plugin::kMtts, field::kHeartRate);
  }
  return f;
}

}  // namespace triage::orchestrator
