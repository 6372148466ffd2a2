#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "triage/orchestrator/plugin.hpp"
#include "triage/vitals/series.hpp"

namespace triage::orchestrator {

/// Year 1 fuses PCR with the MTTS-CAN stand-in; year 2 fuses LWIR with mmWave.
enum class Mode { Year1, Year2 };

const char* to_string(Mode mode);
/// Accepts "year1" and "year2"; throws OrchestratorError otherwise.
Mode mode_from_string(std::string_view name);

namespace plugin {
inline constexpr const char* kLwir = "lwir_rr";
inline constexpr const char* kMmwave = "mmwave";
inline constexpr const char* kPcr = "pcr_rr";
inline constexpr const char* kMtts = "mtts";
inline constexpr const char* kTrauma = "trauma";
inline constexpr const char* kDistress = "respiratory_distress";
inline constexpr const char* kAlertness = "alertness";
inline constexpr const char* kManikinRule = "manikin_rule";
}  // namespace plugin

/// LWIR when valid, else mmWave when valid, else invalid.
vitals::RateEstimate fuse_respiration_y2(const vitals::RateEstimate& lwir, const vitals::RateEstimate& mmwave);

/// PCR when valid, else MTTS when valid, else invalid.
vitals::RateEstimate fuse_respiration_y1(const vitals::RateEstimate& pcr, const vitals::RateEstimate& mtts);

/// Fused vitals; `source` of each estimate is the contributing plugin.
struct FusedVitals {
  vitals::RateEstimate heart_rate{vitals::RateEstimate::invalid("")};
  vitals::RateEstimate respiration{vitals::RateEstimate::invalid("")};
};

/// Applies the mode's rules to completed results. Heart rate comes from
/// mmWave alone in year 2 and from MTTS alone in year 1.
FusedVitals fuse_vitals(const std::vector<PluginResult>& results, Mode mode);

}  // namespace triage::orchestrator
