#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "triage/orchestrator/scorecard.hpp"
#include "triage/sim/scenario.hpp"
#include "triage/sim/world.hpp"

namespace triage::sim {

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScriptReferencesUnknownEntity : public ScriptError {
 public:
  using ScriptError::ScriptError;
};

struct ScriptCommand {
  /// Applied at the first step boundary whose time is >= t, unless `step`
  /// pins the boundary exactly.
  double t{0.0};
  std::optional<long> step;
  Command command;
};

struct Script {
  bool auto_policy{true};
  std::vector<ScriptCommand> commands;

  static Script automatic() { return {}; }
};

/// YAML or JSON: {policy: auto|manual, commands: [{t, kind, ...}]}.
Script load_script(const std::string& text);
Script load_script_file(const std::string& path);

/// Rebuilds the script of a run from its event log: the policy from the
/// start record and every command with its insertion step.
Script script_from_event_log(const std::string& log_text);

/// Throws ScriptReferencesUnknownEntity for robots or plugins that the
/// scenario does not define.
void check_script(const Scenario& scenario, const Script& script);

struct RunResult {
  std::vector<orchestrator::Scorecard> scorecards;
  nlohmann::json metrics;
  std::string event_log;
};

/// Runs the scenario to its duration. Casualty ids in commands are checked
/// when applied, since the map is built during the run; a command naming an
/// unknown casualty is logged as rejected.
RunResult run_headless(const Scenario& scenario, const Script& script);

/// Scorecards as a canonical JSON array, the CLI output form.
std::string scorecards_json(const std::vector<orchestrator::Scorecard>& cards);

}  // namespace triage::sim
