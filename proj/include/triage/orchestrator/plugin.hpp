#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "triage/geoloc/casualty_map.hpp"
#include "triage/vitals/series.hpp"

namespace triage::orchestrator {

using geoloc::CasualtyId;

class OrchestratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicatePlugin : public OrchestratorError {
 public:
  explicit DuplicatePlugin(const std::string& name) : OrchestratorError("duplicate plugin '" + name + "'") {}
};

class UnknownPlugin : public OrchestratorError {
 public:
  explicit UnknownPlugin(const std::string& name) : OrchestratorError("unknown plugin '" + name + "'") {}
};

class UnknownCasualty : public OrchestratorError {
 public:
  explicit UnknownCasualty(CasualtyId id) : OrchestratorError("unknown casualty " + std::to_string(id)) {}
};

// Scorecard field keys.
namespace field {
inline constexpr const char* kHeartRate = "heart_rate_bpm";
inline constexpr const char* kRespiration = "respiration_bpm";
inline constexpr const char* kTraumaHead = "trauma.head";
inline constexpr const char* kTraumaTorso = "trauma.torso";
inline constexpr const char* kTraumaUpper = "trauma.upper_extremity";
inline constexpr const char* kTraumaLower = "trauma.lower_extremity";
inline constexpr const char* kSevereHemorrhage = "severe_hemorrhage";
inline constexpr const char* kRespiratoryDistress = "respiratory_distress";
inline constexpr const char* kAlertOcular = "alertness.ocular";
inline constexpr const char* kAlertVerbal = "alertness.verbal";
inline constexpr const char* kAlertMotor = "alertness.motor";
inline constexpr const char* kDescription = "description";
}  // namespace field

/// The nine boolean classifier fields, in scorecard order.
const std::vector<std::string>& classifier_fields();

using FieldValue = std::variant<vitals::RateEstimate, bool, std::string>;
using FieldValues = std::map<std::string, FieldValue>;

inline constexpr double kDefaultTimeout = 20.0;

struct PluginDescriptor {
  std::string name;
  bool enabled{true};
  std::vector<std::string> produces;
  /// Simulated seconds.
  double timeout{kDefaultTimeout};
};

struct AssessmentRequest {
  CasualtyId casualty_id{0};
  double trigger_time{0.0};
  std::string robot;
};

/// What a plugin hands back: its field values and the simulated time it
/// took to produce them.
struct PluginOutput {
  FieldValues values;
  double elapsed{0.0};
};

using PluginFn = std::function<PluginOutput(const AssessmentRequest&)>;

struct PluginConfig {
  PluginDescriptor descriptor;
  PluginFn run;
};

struct PluginResult {
  std::string plugin;
  /// Empty unless completed.
  FieldValues values;
  bool completed{false};
  double elapsed{0.0};
  std::string error;
};

/// The enabled subset of a plugin configuration, in configuration order.
class Registry {
 public:
  /// Throws DuplicatePlugin on repeated names (enabled or not) and
  /// OrchestratorError on a non-positive timeout or missing function.
  static Registry configure(const std::vector<PluginConfig>& configs);

  const std::vector<PluginConfig>& plugins() const { return plugins_; }
  bool contains(const std::string& name) const;
  std::size_t size() const { return plugins_.size(); }
  bool empty() const { return plugins_.empty(); }

 private:
  std::vector<PluginConfig> plugins_;
};

/// Invokes every registered plugin once. A plugin whose elapsed time exceeds
/// its timeout, or which throws, is reported with completed = false and no
/// values. Values for fields the plugin does not declare are dropped.
std::vector<PluginResult> run_assessment(const AssessmentRequest& request, const Registry& registry,
                                         const geoloc::CasualtyMap& map);

/// Time from trigger until every result is in: the largest elapsed time,
/// each capped at its plugin's timeout.
double assessment_duration(const std::vector<PluginResult>& results);

}  // namespace triage::orchestrator
