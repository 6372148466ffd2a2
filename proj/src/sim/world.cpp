#include "triage/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "triage/geoloc/ground.hpp"
#include "triage/sim/plugins.hpp"

namespace triage::sim {

namespace {

using json = nlohmann::json;
namespace orch = orchestrator;

constexpr double kEps = 1e-9;
// UGV camera height above the ground, and the lidar return radius of a body.
constexpr double kUgvCameraHeight = 0.5;
constexpr double kBodyRadius = 0.3;
constexpr int kLidarReturns = 24;
constexpr double kLidarSigma = 0.02;
constexpr const char* kCasualtyStream = "casualty_map";
constexpr const char* kPoseStream = "robot_pose";

json vec(const Eigen::Vector3d& p) { return json::array({p.x(), p.y(), p.z()}); }

double horizontal(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return (a - b).head<2>().norm(); }

}  // namespace

const char* to_string(RobotStatus status) {
  switch (status) {
    case RobotStatus::Idle: return "idle";
    case RobotStatus::Sweeping: return "sweeping";
    case RobotStatus::Moving: return "moving";
    case RobotStatus::Arrived: return "arrived";
    case RobotStatus::Assessing: return "assessing";
    case RobotStatus::Returning: return "returning";
  }
  return "idle";
}

const char* to_string(Command::Kind kind) {
  switch (kind) {
    case Command::Kind::Dispatch: return "dispatch";
    case Command::Kind::Trigger: return "trigger";
    case Command::Kind::TogglePlugin: return "toggle_plugin";
  }
  return "dispatch";
}

json to_json(const Command& cmd) {
  json j{{"kind", to_string(cmd.kind)}, {"id", cmd.id}};
  switch (cmd.kind) {
    case Command::Kind::Dispatch:
      j["robot"] = cmd.robot;
      j["casualty"] = cmd.casualty;
      break;
    case Command::Kind::Trigger: j["robot"] = cmd.robot; break;
    case Command::Kind::TogglePlugin:
      j["plugin"] = cmd.plugin;
      j["enabled"] = cmd.enabled;
      break;
  }
  return j;
}

Command command_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("command must be an object");
  const auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw std::invalid_argument(std::string("missing string '") + key + "'");
    return j[key].get<std::string>();
  };
  Command c;
  const auto kind = str("kind");
  c.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : "";
  if (kind == "dispatch") {
    c.kind = Command::Kind::Dispatch;
    c.robot = str("robot");
    if (!j.contains("casualty") || !j["casualty"].is_number_integer()) {
      throw std::invalid_argument("missing integer 'casualty'");
    }
    c.casualty = j["casualty"].get<CasualtyId>();
  } else if (kind == "trigger") {
    c.kind = Command::Kind::Trigger;
    c.robot = str("robot");
  } else if (kind == "toggle_plugin") {
    c.kind = Command::Kind::TogglePlugin;
    c.plugin = str("plugin");
    if (!j.contains("enabled") || !j["enabled"].is_boolean()) throw std::invalid_argument("missing boolean 'enabled'");
    c.enabled = j["enabled"].get<bool>();
  } else {
    throw std::invalid_argument("unknown command kind '" + kind + "'");
  }
  return c;
}

double link_quality(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double range_0db) {
  return std::clamp(1.0 - (a - b).norm() / range_0db, 0.0, 1.0);
}

geoloc::SensorPosed uav_pose(const Eigen::Vector3d& position) {
  return {position, geoloc::nadir_orientation<double>()};
}

std::vector<Eigen::Vector3d> sweep_route(const Scenario& s, const RobotSpec& uav) {
  const double footprint = uav.altitude * uav.camera.image_height / uav.camera.fy;
  const double spacing = footprint * (1.0 - uav.lane_overlap);
  const double z = s.ground_z + uav.altitude;
  std::vector<Eigen::Vector3d> route{Eigen::Vector3d(uav.start.x(), uav.start.y(), z)};
  bool east = true;
  for (double y = std::min(spacing / 2.0, s.field_height / 2.0);; y += spacing) {
    const double lane = std::min(y, s.field_height);
    const double x0 = east ? 0.0 : s.field_width;
    const double x1 = east ? s.field_width : 0.0;
    route.emplace_back(x0, lane, z);
    route.emplace_back(x1, lane, z);
    east = !east;
    if (lane + footprint / 2.0 >= s.field_height) break;
  }
  return route;
}

std::vector<UavDetection> uav_detect(const Scenario& s, const RobotState& uav, double time, Rng& rng) {
  const auto pose = uav_pose(uav.position);
  const auto& cam = uav.spec.camera;
  boost::random::bernoulli_distribution<double> hit(s.detection.p_det);
  boost::random::normal_distribution<double> noise(0.0, 1.0);
  std::vector<UavDetection> out;
  for (std::size_t i = 0; i < s.casualties.size(); ++i) {
    double u = 0.0;
    double v = 0.0;
    if (!geoloc::world_to_pixel(s.casualties[i].position, cam, pose, u, v) || !cam.contains(u, v)) continue;
    if (!hit(rng)) continue;
    if (s.detection.sigma_px > 0.0) {
      u += s.detection.sigma_px * noise(rng);
      v += s.detection.sigma_px * noise(rng);
    }
    out.push_back({{u, v, time, uav.spec.id}, i});
  }
  return out;
}

World::World(Scenario scenario, bool auto_policy)
    : scenario_(std::move(scenario)), auto_policy_(auto_policy) {
  const double dt = scenario_.dt;
  detect_every_ = std::max(1L, std::lround(1.0 / (scenario_.detection.rate_hz * dt)));
  sync_every_ = std::max(1L, std::lround(scenario_.link.sync_interval / dt));
  pose_every_ = std::max(1L, std::lround(1.0 / dt));

  stores_.emplace(kBasestation, meshsync::Store(kBasestation));
  for (std::size_t i = 0; i < scenario_.robots.size(); ++i) {
    const RobotSpec& spec = scenario_.robots[i];
    RobotState r;
    r.spec = spec;
    r.position = spec.start;
    r.heading = spec.heading;
    if (spec.kind == RobotKind::Uav) {
      r.status = RobotStatus::Sweeping;
      r.route = sweep_route(scenario_, spec);
      detect_rng_.emplace(spec.id, Rng(derive_seed(scenario_.seed, {kDetectStream, i})));
    } else {
      orchestrators_.emplace(
          spec.id, orch::Orchestrator(make_sim_plugins(scenario_,
                                                       [this](const orch::AssessmentRequest& req) {
                                                         return subject_of(req.robot);
                                                       }),
                                      scenario_.mode));
    }
    robots_.push_back(std::move(r));
    stores_.emplace(spec.id, meshsync::Store(spec.id));
  }

  json casualties = json::array();
  for (std::size_t i = 0; i < scenario_.casualties.size(); ++i) {
    const auto& c = scenario_.casualties[i];
    casualties.push_back({{"index", i}, {"position", vec(c.position)}, {"manikin", c.manikin}});
  }
  json robots = json::array();
  for (const auto& r : robots_) {
    robots.push_back({{"id", r.spec.id}, {"kind", to_string(r.spec.kind)}, {"start", vec(r.spec.start)}});
  }
  log("start", {{"seed", scenario_.seed},
                {"dt", dt},
                {"duration", scenario_.duration},
                {"mode", orch::to_string(scenario_.mode)},
                {"policy", auto_policy_ ? "auto" : "manual"},
                {"casualties", casualties},
                {"robots", robots}});
  update_links();
}

RobotState* World::find_robot(const std::string& id) {
  for (auto& r : robots_) {
    if (r.spec.id == id) return &r;
  }
  return nullptr;
}

const RobotState* World::robot(const std::string& id) const { return const_cast<World*>(this)->find_robot(id); }

const meshsync::Store& World::store(const std::string& node) const {
  const auto it = stores_.find(node);
  if (it == stores_.end()) throw std::out_of_range("unknown node '" + node + "'");
  return it->second;
}

std::vector<orch::PluginDescriptor> World::plugins() const {
  if (!orchestrators_.empty()) return orchestrators_.begin()->second.descriptors();
  std::vector<orch::PluginDescriptor> out;
  for (const auto& [name, spec] : scenario_.plugins) {
    out.push_back({name, spec.enabled, {}, spec.timeout});
  }
  return out;
}

void World::log(const std::string& kind, json data) {
  data["kind"] = kind;
  data["step"] = step_;
  data["t"] = time();
  events_.push_back(data.dump());
}

std::string World::event_log_text() const {
  std::string out;
  for (const auto& line : events_) {
    out += line;
    out += '\n';
  }
  return out;
}

std::optional<std::size_t> World::nearest_truth(const Eigen::Vector3d& p, double max_distance) const {
  std::optional<std::size_t> best;
  double best_d = max_distance;
  for (std::size_t i = 0; i < scenario_.casualties.size(); ++i) {
    const double d = horizontal(scenario_.casualties[i].position, p);
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

const CasualtyTruth* World::subject_of(const std::string& robot_id) const {
  const RobotState* r = robot(robot_id);
  if (r == nullptr || !r->target) return nullptr;
  const auto* est = map_.find(*r->target);
  if (est == nullptr) return nullptr;
  const auto idx = nearest_truth(est->position, 2.0 * kTriggerRadius);
  return idx ? &scenario_.casualties[*idx] : nullptr;
}

void World::publish_estimate(const std::string& node, CasualtyId id) {
  const auto* e = map_.find(id);
  const json payload{{"casualty_id", id},
                     {"position", vec(e->position)},
                     {"total_weight", e->total_weight},
                     {"detections", e->detection_count}};
  stores_.at(node).put_local(kCasualtyStream, payload.dump(), time());
}

std::string World::validate(const Command& cmd) {
  if (cmd.kind == Command::Kind::TogglePlugin) {
    return default_plugins().count(cmd.plugin) ? "" : "unknown_plugin";
  }
  RobotState* r = find_robot(cmd.robot);
  if (r == nullptr) return "unknown_robot";
  if (r->spec.kind != RobotKind::Ugv) return "not_a_ugv";
  if (r->status == RobotStatus::Assessing) return "busy";
  if (cmd.kind == Command::Kind::Dispatch) {
    return map_.contains(cmd.casualty) ? "" : "unknown_casualty";
  }
  if (!r->target) return "no_target";
  if (horizontal(r->position, map_.find(*r->target)->position) > kTriggerRadius) return "not_in_position";
  return "";
}

CommandResult World::apply(const Command& cmd) {
  const std::string reason = validate(cmd);
  const CommandResult result{reason.empty(), reason};
  log("command", {{"command", to_json(cmd)}, {"accepted", result.accepted}, {"reason", reason}});
  if (!result.accepted) return result;
  switch (cmd.kind) {
    case Command::Kind::Dispatch: dispatch(*find_robot(cmd.robot), cmd.casualty, "command"); break;
    case Command::Kind::Trigger: trigger(*find_robot(cmd.robot), "command"); break;
    case Command::Kind::TogglePlugin:
      scenario_.plugins.at(cmd.plugin).enabled = cmd.enabled;
      for (auto& [id, o] : orchestrators_) o.set_enabled(cmd.plugin, cmd.enabled);
      break;
  }
  return result;
}

void World::dispatch(RobotState& r, CasualtyId id, const char* by) {
  if (r.target) claims_.erase(*r.target);
  r.target = id;
  r.status = RobotStatus::Moving;
  claims_[id] = r.spec.id;
  log("dispatch", {{"robot", r.spec.id}, {"casualty", id}, {"by", by}});
}

CommandResult World::trigger(RobotState& r, const char* by) {
  const CasualtyTruth* subject = subject_of(r.spec.id);
  if (subject != nullptr) ground_fix(r, *subject);
  const auto& o = orchestrators_.at(r.spec.id);
  auto pending = o.start({*r.target, time(), r.spec.id}, map_);
  json results = json::array();
  for (const auto& res : pending.results) {
    results.push_back({{"plugin", res.plugin}, {"completed", res.completed}, {"elapsed", res.elapsed}});
  }
  r.status = RobotStatus::Assessing;
  log("assessment_start", {{"robot", r.spec.id},
                           {"casualty", *r.target},
                           {"by", by},
                           {"completes_at", pending.completes_at},
                           {"results", results}});
  pending_.push_back({r.spec.id, std::move(pending), subject != nullptr && subject->manikin});
  return {true, ""};
}

void World::ground_fix(RobotState& r, const CasualtyTruth& subject) {
  const Eigen::Vector3d cam_pos = r.position + Eigen::Vector3d(0, 0, kUgvCameraHeight);
  const geoloc::SensorPosed pose{cam_pos, geoloc::level_orientation(r.heading)};
  double u = 0.0;
  double v = 0.0;
  const Eigen::Vector3d body = subject.position + Eigen::Vector3d(0, 0, kBodyRadius);
  if (!geoloc::world_to_pixel(body, r.spec.camera, pose, u, v) || !r.spec.camera.contains(u, v)) {
    log("ground_fix", {{"robot", r.spec.id}, {"ok", false}, {"reason", "not_in_view"}});
    return;
  }
  const double bearing = geoloc::bearing_from_pixel(u, r.spec.camera);

  Rng rng(derive_seed(scenario_.seed, {kLidarStream, static_cast<std::uint64_t>(step_),
                                       static_cast<std::uint64_t>(&r - robots_.data())}));
  boost::random::normal_distribution<double> jitter(0.0, kLidarSigma);
  const double c = std::cos(r.heading);
  const double s = std::sin(r.heading);
  std::vector<geoloc::LidarPoint> scan;
  for (int k = 0; k < kLidarReturns; ++k) {
    const double a = 2.0 * std::numbers::pi * k / kLidarReturns;
    const double dx = subject.position.x() + kBodyRadius * std::cos(a) + jitter(rng) - r.position.x();
    const double dy = subject.position.y() + kBodyRadius * std::sin(a) + jitter(rng) - r.position.y();
    scan.push_back({c * dx + s * dy, -s * dx + c * dy, 0.2});
  }
  try {
    const Eigen::Vector3d local = geoloc::localize_from_lidar(scan, bearing);
    Eigen::Vector3d world = geoloc::local_to_world(local, r.heading, r.position);
    world.z() = scenario_.ground_z;
    const auto a = map_.associate(world);
    log("ground_fix", {{"robot", r.spec.id},
                       {"ok", true},
                       {"casualty", a.casualty_id},
                       {"created", a.created},
                       {"position", vec(world)}});
    if (a.created) publish_estimate(r.spec.id, a.casualty_id);
  } catch (const geoloc::NoPointsInWindow&) {
    log("ground_fix", {{"robot", r.spec.id}, {"ok", false}, {"reason", "no_points"}});
  }
  publish_estimate(r.spec.id, *r.target);
}

void World::run_policy() {
  std::vector<CasualtyId> open;
  for (const auto& e : map_.estimates()) {
    if (!claims_.count(e.casualty_id) && !assessed_.count(e.casualty_id)) open.push_back(e.casualty_id);
  }
  for (CasualtyId id : open) {
    const Eigen::Vector3d goal = map_.find(id)->position;
    RobotState* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto& r : robots_) {
      if (r.spec.kind != RobotKind::Ugv) continue;
      if (r.status != RobotStatus::Idle && r.status != RobotStatus::Returning) continue;
      const double d = horizontal(r.position, goal);
      if (d < best_d) {
        best_d = d;
        best = &r;
      }
    }
    if (best == nullptr) break;
    dispatch(*best, id, "auto");
  }
  for (auto& r : robots_) {
    if (r.spec.kind == RobotKind::Ugv && r.status == RobotStatus::Idle && horizontal(r.position, r.spec.start) > kEps) {
      r.status = RobotStatus::Returning;
      log("return", {{"robot", r.spec.id}});
    }
  }
}

void World::move(RobotState& r) {
  const double reach = r.spec.speed * scenario_.dt;
  if (r.spec.kind == RobotKind::Uav) {
    if (r.route.size() < 2) return;
    double remaining = reach;
    while (remaining > kEps) {
      const Eigen::Vector3d wp = r.route[r.waypoint];
      const Eigen::Vector3d delta = wp - r.position;
      const double d = delta.norm();
      if (d > remaining) {
        r.position += delta / d * remaining;
        r.heading = std::atan2(delta.y(), delta.x());
        break;
      }
      r.position = wp;
      remaining -= d;
      if (!r.reverse && r.waypoint + 1 == r.route.size()) r.reverse = true;
      if (r.reverse && r.waypoint == 0) r.reverse = false;
      r.waypoint = r.reverse ? r.waypoint - 1 : r.waypoint + 1;
    }
    return;
  }

  if (r.status == RobotStatus::Moving) {
    const Eigen::Vector3d goal = map_.find(*r.target)->position;
    Eigen::Vector3d delta = goal - r.position;
    delta.z() = 0.0;
    const double d = delta.norm();
    double step = 0.0;
    if (d > kStandoff) {
      step = std::min(reach, d - kStandoff);
      r.position += delta / d * step;
      r.heading = std::atan2(delta.y(), delta.x());
    }
    if (d - step <= kStandoff + kEps) {
      r.status = RobotStatus::Arrived;
      log("arrive", {{"robot", r.spec.id}, {"casualty", *r.target}, {"position", vec(r.position)}});
    }
  } else if (r.status == RobotStatus::Returning) {
    Eigen::Vector3d delta = r.spec.start - r.position;
    delta.z() = 0.0;
    const double d = delta.norm();
    if (d <= reach + kEps) {
      r.position = r.spec.start;
      r.status = RobotStatus::Idle;
      log("home", {{"robot", r.spec.id}});
    } else {
      r.position += delta / d * reach;
      r.heading = std::atan2(delta.y(), delta.x());
    }
  }
}

void World::detect() {
  if (step_ % detect_every_ != 0) return;
  for (const auto& r : robots_) {
    if (r.spec.kind != RobotKind::Uav) continue;
    const auto pose = uav_pose(r.position);
    std::set<CasualtyId> updated;
    for (const auto& d : uav_detect(scenario_, r, time(), detect_rng_.at(r.spec.id))) {
      Eigen::Vector3d p;
      try {
        p = geoloc::pixel_to_world(d.detection, r.spec.camera, pose, scenario_.ground_z);
      } catch (const geoloc::RayNonIntersecting&) {
        continue;
      }
      const double w = geoloc::detection_weight(d.detection, r.spec.camera);
      const auto a = map_.cluster_update(p, w);
      updated.insert(a.casualty_id);
      log("detection", {{"robot", r.spec.id},
                        {"truth", d.truth},
                        {"pixel", {d.detection.pixel_u, d.detection.pixel_v}},
                        {"position", vec(p)},
                        {"weight", w},
                        {"casualty", a.casualty_id},
                        {"created", a.created}});
    }
    for (CasualtyId id : updated) publish_estimate(r.spec.id, id);
  }
}

void World::finish_assessments() {
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->assessment.completes_at > time() + kEps) {
      ++it;
      continue;
    }
    RobotState& r = *find_robot(it->robot);
    const auto card =
        orchestrators_.at(it->robot).build_scorecard(it->assessment, map_, it->manikin, stores_.at(it->robot));
    ++scorecards_built_;
    log("scorecard", {{"robot", it->robot}, {"casualty", card.casualty_id}, {"scorecard", orch::to_json(card)}});
    assessed_.insert(card.casualty_id);
    claims_.erase(card.casualty_id);
    r.target.reset();
    r.status = RobotStatus::Idle;
    it = pending_.erase(it);
  }
}

void World::publish_poses() {
  if (step_ % pose_every_ != 0) return;
  for (const auto& r : robots_) {
    const json payload{{"robot", r.spec.id},
                       {"position", vec(r.position)},
                       {"heading", r.heading},
                       {"status", to_string(r.status)},
                       {"t", time()}};
    stores_.at(r.spec.id).put_local(kPoseStream, payload.dump(), time());
  }
}

bool World::blacked_out(const std::string& node) const {
  const double t = time();
  return std::any_of(scenario_.blackouts.begin(), scenario_.blackouts.end(),
                     [&](const Blackout& b) { return b.node == node && t >= b.start && t < b.end; });
}

void World::update_links() {
  std::vector<std::pair<std::string, Eigen::Vector3d>> nodes{{kBasestation, scenario_.basestation}};
  for (const auto& r : robots_) nodes.emplace_back(r.spec.id, r.position);
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  links_.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const auto& [a, pa] = nodes[i];
      const auto& [b, pb] = nodes[j];
      const double q = blacked_out(a) || blacked_out(b) ? 0.0 : link_quality(pa, pb, scenario_.link.range_0db);
      links_.push_back({a, b, q, scenario_.link.threshold});
    }
  }

  std::set<std::pair<std::string, std::string>> sessions;
  for (const auto& p : monitor_.on_link_event(links_)) sessions.insert(p);
  for (const auto& l : links_) {
    const std::pair<std::string, std::string> key{l.a, l.b};
    const bool up = l.permits_sync();
    if (up && !up_.count(key)) {
      up_.insert(key);
      log("link_up", {{"a", l.a}, {"b", l.b}, {"quality", l.quality}});
    } else if (!up && up_.count(key)) {
      up_.erase(key);
      log("link_down", {{"a", l.a}, {"b", l.b}, {"quality", l.quality}});
    }
    if (up && step_ % sync_every_ == 0) sessions.insert(key);
  }

  for (const auto& [a, b] : sessions) {
    const auto link = std::find_if(links_.begin(), links_.end(),
                                   [&](const meshsync::LinkState& l) { return l.a == a && l.b == b; });
    const auto summary = meshsync::sync_session(stores_.at(a), stores_.at(b), *link);
    if (summary.total() > 0) {
      log("sync", {{"a", a}, {"b", b}, {"a_to_b", summary.a_to_b}, {"b_to_a", summary.b_to_a}});
    }
  }
}

void World::record_deliveries() {
  for (const auto* rec : stores_.at(kBasestation).stream_records(orch::kScorecardStream)) {
    if (!delivered_keys_.insert(rec->key).second) continue;
    const auto card = orch::scorecard_from_json(json::parse(rec->payload));
    deliveries_.push_back({rec->key, card.casualty_id, rec->created_at, time()});
    log("delivered", {{"origin", rec->key.origin},
                      {"seq", rec->key.seq},
                      {"casualty", card.casualty_id},
                      {"latency", time() - rec->created_at}});
  }
}

void World::step() {
  ++step_;
  if (auto_policy_) run_policy();
  for (auto& r : robots_) move(r);
  detect();
  if (auto_policy_) {
    for (auto& r : robots_) {
      if (r.spec.kind == RobotKind::Ugv && r.status == RobotStatus::Arrived) trigger(r, "auto");
    }
  }
  finish_assessments();
  publish_poses();
  update_links();
  record_deliveries();
}

void World::finish() {
  if (finished_) return;
  finished_ = true;
  json estimates = json::array();
  for (const auto& e : map_.estimates()) {
    estimates.push_back({{"casualty_id", e.casualty_id},
                         {"position", vec(e.position)},
                         {"total_weight", e.total_weight},
                         {"detections", e.detection_count}});
  }
  log("final_map", {{"estimates", estimates}});
  log("end", {{"scorecards_built", scorecards_built_}, {"delivered", deliveries_.size()}});
}

std::vector<orch::Scorecard> World::basestation_scorecards() const {
  std::vector<orch::Scorecard> out;
  for (const auto* rec : store(kBasestation).stream_records(orch::kScorecardStream)) {
    out.push_back(orch::scorecard_from_json(json::parse(rec->payload)));
  }
  return out;
}

std::set<CasualtyId> World::basestation_casualty_ids() const {
  std::set<CasualtyId> out;
  for (const auto* rec : store(kBasestation).stream_records(kCasualtyStream)) {
    out.insert(json::parse(rec->payload).at("casualty_id").get<CasualtyId>());
  }
  return out;
}

}  // namespace triage::sim
