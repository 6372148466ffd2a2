#pragma once

#include <atomic>
#include <iosfwd>
#include <string>
#include <vector>

namespace triage::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kScenarioError = 2,
  kTraceError = 3,
  kUnknownPipeline = 4,
  kBindError = 5,
};

struct RunConfig {
  std::string scenario;
  /// "auto" or a script file.
  std::string script{"auto"};
  std::string out{"out"};
  /// Empty keeps the scenario's mode.
  std::string mode;
  std::vector<std::string> overrides;
};

struct VitalsConfig {
  std::string trace;
  std::string pipeline;
};

struct SynthConfig {
  std::string modality{"mmwave"};
  double hr_bpm{75.0};
  double rr_bpm{15.0};
  double snr_db{20.0};
  std::uint64_t seed{1};
  double duration{0.0};
  /// White noise at the modality's rate, no vital signs (mmwave and pcr).
  bool noise_only{false};
  std::string out;
};

struct ServeConfig {
  std::string scenario;
  std::string address{"127.0.0.1"};
  int port{8700};
  double pace{1.0};
  std::vector<std::string> overrides;
  bool manual{false};
  /// Return once the run has finished instead of serving until stopped.
  bool exit_on_finish{false};
};

/// Pipelines accepted by `vitals`, in listing order.
const std::vector<std::string>& pipelines();

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_vitals(const VitalsConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthConfig& config, std::ostream& out, std::ostream& err);
/// Serves until `stop` is set (or the run finishes with exit_on_finish).
int cmd_serve(const ServeConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>& stop);

/// Parses `args` (without the program name) and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::atomic<bool>& stop);

}  // namespace triage::cli
