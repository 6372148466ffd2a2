#include "triage/service/protocol.hpp"

#include "triage/orchestrator/scorecard.hpp"

#ifndef TRIAGE_VERSION
#define TRIAGE_VERSION "0.0.0"
#endif
#ifndef TRIAGE_BUILD_TYPE
#define TRIAGE_BUILD_TYPE "unknown"
#endif

namespace triage::service {

namespace {

using json = nlohmann::json;

json vec(const Eigen::Vector3d& p) { return json::array({p.x(), p.y(), p.z()}); }

}  // namespace

json snapshot_json(const sim::World& world, long seq, bool finished) {
  json robots = json::array();
  for (const auto& r : world.robots()) {
    robots.push_back({
        {"id", r.spec.id},
        {"kind", sim::to_string(r.spec.kind)},
        {"position", vec(r.position)},
        {"heading", r.heading},
        {"status", sim::to_string(r.status)},
        {"target", r.target ? json(*r.target) : json(nullptr)},
    });
  }

  const auto at_base = world.basestation_casualty_ids();
  json casualties = json::array();
  for (const auto& e : world.casualty_map().estimates()) {
    casualties.push_back({
        {"casualty_id", e.casualty_id},
        {"position", vec(e.position)},
        {"total_weight", e.total_weight},
        {"detections", e.detection_count},
        {"at_basestation", at_base.count(e.casualty_id) > 0},
    });
  }

  json scorecards = json::array();
  for (const auto& card : world.basestation_scorecards()) scorecards.push_back(orchestrator::to_json(card));

  json links = json::array();
  for (const auto& l : world.links()) {
    links.push_back({{"a", l.a}, {"b", l.b}, {"quality", l.quality}, {"up", l.permits_sync()}});
  }

  json plugins = json::array();
  for (const auto& p : world.plugins()) {
    plugins.push_back({{"name", p.name}, {"enabled", p.enabled}, {"timeout", p.timeout}});
  }

  return {
      {"type", "snapshot"},
      {"proto_version", kProtoVersion},
      {"seq", seq},
      {"step", world.step_index()},
      {"t", world.time()},
      {"finished", finished},
      {"robots", std::move(robots)},
      {"casualties", std::move(casualties)},
      {"scorecards", std::move(scorecards)},
      {"links", std::move(links)},
      {"plugins", std::move(plugins)},
  };
}

sim::Command parse_command(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw MalformedMessage(std::nullopt, "not valid JSON");
  if (!j.is_object()) throw MalformedMessage(std::nullopt, "message must be an object");
  std::optional<std::string> id;
  if (j.contains("id") && j["id"].is_string() && !j["id"].get<std::string>().empty()) {
    id = j["id"].get<std::string>();
  }
  if (!j.contains("type") || j["type"] != "command") throw MalformedMessage(id, "type must be \"command\"");
  if (!id) throw MalformedMessage(std::nullopt, "missing string 'id'");
  if (j.contains("proto_version") && j["proto_version"] != kProtoVersion) {
    throw MalformedMessage(id, "unsupported proto_version");
  }
  try {
    return sim::command_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw MalformedMessage(id, e.what());
  }
}

json ack_json(const std::optional<std::string>& id, const sim::CommandResult& result, std::optional<long> step) {
  return {
      {"type", "ack"},
      {"proto_version", kProtoVersion},
      {"id", id ? json(*id) : json(nullptr)},
      {"status", result.accepted ? "accepted" : "rejected"},
      {"reason", result.accepted ? json(nullptr) : json(result.reason)},
      {"step", step ? json(*step) : json(nullptr)},
  };
}

json health_json(const std::string& scenario_name, double sim_time, bool finished) {
  return {
      {"status", "ok"},
      {"service", "triage"},
      {"version", version()},
      {"proto_version", kProtoVersion},
      {"scenario_version", sim::kScenarioVersion},
      {"scorecard_version", orchestrator::kScorecardVersion},
      {"build", {{"type", TRIAGE_BUILD_TYPE}, {"compiler", __VERSION__}, {"cxx", __cplusplus}}},
      {"simulation", {{"scenario", scenario_name}, {"t", sim_time}, {"finished", finished}}},
  };
}

const char* version() { return TRIAGE_VERSION; }

}  // namespace triage::service
