#include "triage/sim/runner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "triage/sim/metrics.hpp"

namespace triage::sim {

namespace {

using json = nlohmann::json;

template <typename T>
T scalar(const YAML::Node& n, const std::string& key, const std::string& path) {
  const YAML::Node v = n[key];
  if (!v.IsDefined() || !v.IsScalar()) throw ScriptError(path + "." + key + ": required field missing");
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ScriptError(path + "." + key + ": cannot parse '" + v.Scalar() + "'");
  }
}

ScriptCommand read_command(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) throw ScriptError(path + ": expected a mapping");
  ScriptCommand sc;
  if (n["step"].IsDefined()) sc.step = scalar<long>(n, "step", path);
  sc.t = n["t"].IsDefined() ? scalar<double>(n, "t", path) : 0.0;
  if (!sc.step && !n["t"].IsDefined()) throw ScriptError(path + ": needs t or step");
  const auto kind = scalar<std::string>(n, "kind", path);
  Command& c = sc.command;
  c.id = n["id"].IsDefined() ? scalar<std::string>(n, "id", path) : "";
  if (kind == "dispatch") {
    c.kind = Command::Kind::Dispatch;
    c.robot = scalar<std::string>(n, "robot", path);
    c.casualty = scalar<CasualtyId>(n, "casualty", path);
  } else if (kind == "trigger") {
    c.kind = Command::Kind::Trigger;
    c.robot = scalar<std::string>(n, "robot", path);
  } else if (kind == "toggle_plugin") {
    c.kind = Command::Kind::TogglePlugin;
    c.plugin = scalar<std::string>(n, "plugin", path);
    c.enabled = scalar<bool>(n, "enabled", path);
  } else {
    throw ScriptError(path + ".kind: unknown command '" + kind + "'");
  }
  return sc;
}

double due_time(const ScriptCommand& c, double dt) {
  return c.step ? static_cast<double>(*c.step) * dt : c.t;
}

}  // namespace

Script load_script(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ScriptError(std::string("malformed script: ") + e.what());
  }
  if (!doc.IsMap()) throw ScriptError("script must be a mapping");
  Script s;
  const auto policy = doc["policy"].IsDefined() ? doc["policy"].as<std::string>() : "manual";
  if (policy != "auto" && policy != "manual") throw ScriptError("policy: expected auto or manual");
  s.auto_policy = policy == "auto";
  if (doc["commands"].IsDefined()) {
    if (!doc["commands"].IsSequence()) throw ScriptError("commands: expected a list");
    for (std::size_t i = 0; i < doc["commands"].size(); ++i) {
      s.commands.push_back(read_command(doc["commands"][i], "commands." + std::to_string(i)));
    }
  }
  return s;
}

Script load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScriptError("cannot open script file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_script(ss.str());
}

Script script_from_event_log(const std::string& log_text) {
  Script s;
  std::istringstream in(log_text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "start") {
      s.auto_policy = j.at("policy") == "auto";
    } else if (kind == "command") {
      s.commands.push_back({j.at("t").get<double>(), j.at("step").get<long>(), command_from_json(j.at("command"))});
    }
  }
  return s;
}

void check_script(const Scenario& scenario, const Script& script) {
  for (const auto& sc : script.commands) {
    const Command& c = sc.command;
    if (c.kind == Command::Kind::TogglePlugin) {
      if (!default_plugins().count(c.plugin)) {
        throw ScriptReferencesUnknownEntity("script names unknown plugin '" + c.plugin + "'");
      }
    } else if (scenario.robot(c.robot) == nullptr) {
      throw ScriptReferencesUnknownEntity("script names unknown robot '" + c.robot + "'");
    }
  }
}

RunResult run_headless(const Scenario& scenario, const Script& script) {
  check_script(scenario, script);
  std::vector<ScriptCommand> queue = script.commands;
  std::stable_sort(queue.begin(), queue.end(), [&](const ScriptCommand& a, const ScriptCommand& b) {
    return due_time(a, scenario.dt) < due_time(b, scenario.dt);
  });

  World world(scenario, script.auto_policy);
  std::size_t next = 0;
  while (true) {
    while (next < queue.size()) {
      const auto& sc = queue[next];
      const bool due = sc.step ? *sc.step <= world.step_index() : sc.t <= world.time() + 1e-9;
      if (!due) break;
      world.apply(sc.command);
      ++next;
    }
    if (world.finished()) break;
    world.step();
  }
  world.finish();

  RunResult out;
  out.scorecards = world.basestation_scorecards();
  out.metrics = compute_metrics(world);
  out.event_log = world.event_log_text();
  return out;
}

std::string scorecards_json(const std::vector<orchestrator::Scorecard>& cards) {
  json arr = json::array();
  for (const auto& c : cards) arr.push_back(orchestrator::to_json(c));
  return arr.dump(2) + "\n";
}

}  // namespace triage::sim
