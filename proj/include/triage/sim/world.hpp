#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "triage/geoloc/casualty_map.hpp"
#include "triage/meshsync/store.hpp"
#include "triage/meshsync/sync.hpp"
#include "triage/orchestrator/orchestrator.hpp"
#include "triage/sim/rng.hpp"
#include "triage/sim/scenario.hpp"

namespace triage::sim {

using geoloc::CasualtyId;

/// A UGV stops this far from its goal.
inline constexpr double kStandoff = 1.0;
/// A trigger is accepted only within this distance of the target.
inline constexpr double kTriggerRadius = 2.0;

enum class RobotStatus { Idle, Sweeping, Moving, Arrived, Assessing, Returning };
const char* to_string(RobotStatus status);

struct RobotState {
  RobotSpec spec;
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  double heading{0.0};
  RobotStatus status{RobotStatus::Idle};
  std::optional<CasualtyId> target;
  // UAV sweep
  std::vector<Eigen::Vector3d> route;
  std::size_t waypoint{0};
  bool reverse{false};
};

struct Command {
  enum class Kind { Dispatch, Trigger, TogglePlugin };
  Kind kind{Kind::Dispatch};
  std::string id;
  std::string robot;
  CasualtyId casualty{-1};
  std::string plugin;
  bool enabled{true};
};

const char* to_string(Command::Kind kind);
nlohmann::json to_json(const Command& cmd);
/// Throws std::invalid_argument with a description on malformed input.
Command command_from_json(const nlohmann::json& j);

struct CommandResult {
  bool accepted{false};
  std::string reason;
};

/// Link quality from distance: clamp(1 - d / range_0db, 0, 1).
double link_quality(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double range_0db);

/// Boustrophedon waypoints covering the field at the UAV's altitude. Lanes
/// run along x and are spaced by the footprint height times (1 - overlap).
std::vector<Eigen::Vector3d> sweep_route(const Scenario& scenario, const RobotSpec& uav);

/// Nadir camera pose of a UAV at `position`.
geoloc::SensorPosed uav_pose(const Eigen::Vector3d& position);

struct UavDetection {
  geoloc::Detectiond detection;
  /// Index into Scenario::casualties.
  std::size_t truth{0};
};

/// Every casualty whose exact projection falls inside the image is detected
/// with probability p_det; the reported pixel is the projection plus
/// N(0, sigma_px) noise per axis.
std::vector<UavDetection> uav_detect(const Scenario& scenario, const RobotState& uav, double time, Rng& rng);

struct Delivery {
  meshsync::RecordKey key;
  CasualtyId casualty_id{0};
  double created_at{0.0};
  double delivered_at{0.0};
};

/// The simulated mission. Owns ground truth, the fused casualty map, one
/// replica per node and one orchestrator per UGV. Advances only through
/// step(); commands are applied between steps.
class World {
 public:
  World(Scenario scenario, bool auto_policy);
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  const Scenario& scenario() const { return scenario_; }
  bool auto_policy() const { return auto_policy_; }
  long step_index() const { return step_; }
  double time() const { return static_cast<double>(step_) * scenario_.dt; }
  bool finished() const { return step_ >= scenario_.total_steps(); }

  /// Applies a command at the current step boundary and logs it.
  CommandResult apply(const Command& cmd);

  void step();

  /// Writes the closing events. Called once, after the last step.
  void finish();

  const std::vector<RobotState>& robots() const { return robots_; }
  const RobotState* robot(const std::string& id) const;
  const geoloc::CasualtyMap& casualty_map() const { return map_; }
  const meshsync::Store& store(const std::string& node) const;
  const std::vector<meshsync::LinkState>& links() const { return links_; }
  std::vector<orchestrator::PluginDescriptor> plugins() const;

  /// Scorecards held by the basestation, ordered by (origin, seq).
  std::vector<orchestrator::Scorecard> basestation_scorecards() const;
  /// Casualty ids in the basestation's replicated casualty map.
  std::set<CasualtyId> basestation_casualty_ids() const;

  const std::vector<Delivery>& deliveries() const { return deliveries_; }
  std::size_t scorecards_built() const { return scorecards_built_; }
  /// Index into Scenario::casualties of the truth nearest to a map estimate.
  std::optional<std::size_t> nearest_truth(const Eigen::Vector3d& p, double max_distance) const;

  const std::vector<std::string>& event_log() const { return events_; }
  std::string event_log_text() const;

 private:
  struct Pending {
    std::string robot;
    orchestrator::PendingAssessment assessment;
    bool manikin{false};
  };

  RobotState* find_robot(const std::string& id);
  void log(const std::string& kind, nlohmann::json data);
  void dispatch(RobotState& r, CasualtyId id, const char* by);
  CommandResult trigger(RobotState& r, const char* by);
  void ground_fix(RobotState& r, const CasualtyTruth& subject);
  const CasualtyTruth* subject_of(const std::string& robot) const;
  std::string validate(const Command& cmd);
  void publish_estimate(const std::string& node, CasualtyId id);
  void run_policy();
  void move(RobotState& r);
  void detect();
  void finish_assessments();
  void publish_poses();
  void update_links();
  void record_deliveries();
  bool blacked_out(const std::string& node) const;

  Scenario scenario_;
  bool auto_policy_;
  long step_{0};
  long detect_every_{1};
  long sync_every_{1};
  long pose_every_{1};
  bool finished_{false};

  std::vector<RobotState> robots_;
  geoloc::CasualtyMap map_;
  std::map<std::string, meshsync::Store> stores_;
  std::map<std::string, orchestrator::Orchestrator> orchestrators_;
  std::vector<Pending> pending_;
  std::map<CasualtyId, std::string> claims_;
  std::set<CasualtyId> assessed_;

  meshsync::LinkMonitor monitor_;
  std::vector<meshsync::LinkState> links_;
  std::set<std::pair<std::string, std::string>> up_;

  std::map<std::string, Rng> detect_rng_;
  std::set<meshsync::RecordKey> delivered_keys_;
  std::vector<Delivery> deliveries_;
  std::size_t scorecards_built_{0};
  std::vector<std::string> events_;
};

}  // namespace triage::sim
