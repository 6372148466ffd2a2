#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "triage/geoloc/projection.hpp"
#include "triage/orchestrator/fusion.hpp"

namespace triage::sim {

inline constexpr int kScenarioVersion = 1;
inline constexpr const char* kBasestation = "basestation";

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing, unknown or mistyped field. `path` is the dotted field path.
class SchemaError : public ScenarioError {
 public:
  SchemaError(std::string path, const std::string& message)
      : ScenarioError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class BoundsError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

struct CasualtyTruth {
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  double hr_bpm{75.0};
  double rr_bpm{15.0};
  bool manikin{false};
  /// Classifier field key -> ground-truth label.
  std::map<std::string, bool> labels;
};

enum class RobotKind { Uav, Ugv };
const char* to_string(RobotKind kind);

struct RobotSpec {
  std::string id;
  RobotKind kind{RobotKind::Ugv};
  Eigen::Vector3d start{Eigen::Vector3d::Zero()};
  /// Radians, counter-clockwise from east.
  double heading{0.0};
  double speed{1.0};
  /// UAV flight altitude above the ground plane.
  double altitude{40.0};
  /// UAV lane spacing as a fraction of the footprint height.
  double lane_overlap{0.2};
  geoloc::CameraModeld camera{800.0, 800.0, 640.0, 360.0, 1280.0, 720.0};
};

struct LinkParams {
  double range_0db{120.0};
  double threshold{0.5};
  /// Seconds between anti-entropy sessions on a live link.
  double sync_interval{1.0};
};

struct DetectionParams {
  double p_det{0.9};
  double sigma_px{2.0};
  double rate_hz{1.0};
};

/// All links of `node` are down on [start, end).
struct Blackout {
  std::string node;
  double start{0.0};
  double end{0.0};
};

struct PluginSpec {
  bool enabled{true};
  double timeout{orchestrator::kDefaultTimeout};
  /// Simulated time the plugin takes.
  double elapsed{12.0};
};

struct VitalsParams {
  double snr_db{20.0};
  double thermal_drift_per_s{0.0};
  double motion_episodes_per_min{0.0};
};

struct Scenario {
  std::uint64_t seed{0};
  orchestrator::Mode mode{orchestrator::Mode::Year2};
  double dt{0.1};
  double duration{600.0};
  double ground_z{0.0};
  double field_width{50.0};
  double field_height{50.0};
  Eigen::Vector3d basestation{Eigen::Vector3d::Zero()};
  LinkParams link;
  DetectionParams detection;
  double classifier_accuracy{0.8};
  VitalsParams vitals;
  std::map<std::string, PluginSpec> plugins;
  std::vector<CasualtyTruth> casualties;
  std::vector<RobotSpec> robots;
  std::vector<Blackout> blackouts;

  long total_steps() const;
  const RobotSpec* robot(const std::string& id) const;
};

/// Plugin names known to the simulator, with their default specs.
const std::map<std::string, PluginSpec>& default_plugins();

using Override = std::pair<std::string, std::string>;

/// Parses and validates a YAML scenario. Overrides are dotted paths
/// ("sim.dt", "robots.1.speed") applied to the document before validation;
/// a path outside the schema is a SchemaError.
Scenario load_scenario(const std::string& text, const std::vector<Override>& overrides = {});
Scenario load_scenario_file(const std::string& path, const std::vector<Override>& overrides = {});

/// Parses "key=value".
Override parse_override(const std::string& text);

}  // namespace triage::sim
