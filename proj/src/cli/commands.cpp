#include "triage/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "triage/service/gateway.hpp"
#include "triage/service/protocol.hpp"
#include "triage/sim/runner.hpp"
#include "triage/vitals/estimators.hpp"
#include "triage/vitals/synth.hpp"
#include "triage/vitals/thermal.hpp"
#include "triage/vitals/trace_io.hpp"

namespace triage::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::vector<sim::Override> parse_overrides(const std::vector<std::string>& raw, const std::string& mode) {
  std::vector<sim::Override> out;
  for (const auto& kv : raw) out.push_back(sim::parse_override(kv));
  if (!mode.empty()) out.push_back({"mode", mode});
  return out;
}

bool write_file(const fs::path& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

struct PipelineSpec {
  const char* name;
  vitals::Modality modality;
};

const std::vector<PipelineSpec>& pipeline_specs() {
  static const std::vector<PipelineSpec> specs{
      {"rppg_hr", vitals::Modality::Rgb},    {"mmwave_hr", vitals::Modality::Mmwave},
      {"mmwave_rr", vitals::Modality::Mmwave}, {"pcr_rr", vitals::Modality::Pcr},
      {"lwir_rr", vitals::Modality::Thermal},
  };
  return specs;
}

vitals::RateEstimate run_pipeline(const std::string& name, const vitals::SynthOutput& data) {
  if (name == "rppg_hr") return vitals::estimate_hr_rppg(std::get<vitals::RgbTrace>(data));
  if (name == "mmwave_hr") return vitals::estimate_rate_mmwave(std::get<vitals::SampleSeries>(data), vitals::kCardiacBand);
  if (name == "mmwave_rr") {
    return vitals::estimate_rate_mmwave(std::get<vitals::SampleSeries>(data), vitals::kRespiratoryBand);
  }
  if (name == "pcr_rr") return vitals::estimate_rr_pcr(std::get<vitals::SampleSeries>(data));
  return vitals::estimate_rr_thermal(std::get<vitals::ThermalRoiTrace>(data)).averaged;
}

}  // namespace

const std::vector<std::string>& pipelines() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : pipeline_specs()) n.emplace_back(s.name);
    return n;
  }();
  return names;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  sim::RunResult result;
  try {
    const auto scenario = sim::load_scenario_file(config.scenario, parse_overrides(config.overrides, config.mode));
    const auto script = config.script == "auto" ? sim::Script::automatic() : sim::load_script_file(config.script);
    result = sim::run_headless(scenario, script);
  } catch (const sim::ScenarioError& e) {
    err << "scenario error: " << e.what() << "\n";
    return kScenarioError;
  } catch (const sim::ScriptError& e) {
    err << "script error: " << e.what() << "\n";
    return kScenarioError;
  }

  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) {
    err << "error: cannot create " << config.out << ": " << ec.message() << "\n";
    return kUsage;
  }
  const fs::path dir(config.out);
  if (!write_file(dir / "scorecards.json", sim::scorecards_json(result.scorecards), err) ||
      !write_file(dir / "metrics.json", result.metrics.dump(2) + "\n", err) ||
      !write_file(dir / "events.log", result.event_log, err)) {
    return kUsage;
  }
  out << "wrote " << result.scorecards.size() << " scorecards to " << dir.string() << "\n";
  return kOk;
}

int cmd_vitals(const VitalsConfig& config, std::ostream& out, std::ostream& err) {
  const auto& specs = pipeline_specs();
  const auto spec = std::find_if(specs.begin(), specs.end(), [&](const auto& s) { return config.pipeline == s.name; });
  if (spec == specs.end()) {
    err << "unknown pipeline '" << config.pipeline << "'; available:";
    for (const auto& n : pipelines()) err << " " << n;
    err << "\n";
    return kUnknownPipeline;
  }
  vitals::Trace trace;
  try {
    trace = vitals::load_trace(config.trace);
  } catch (const vitals::TraceParseError& e) {
    err << "trace error: " << e.what() << "\n";
    return kTraceError;
  }
  if (trace.modality != spec->modality) {
    err << "trace error: pipeline " << spec->name << " needs a " << vitals::to_string(spec->modality)
        << " trace, got " << vitals::to_string(trace.modality) << "\n";
    return kTraceError;
  }

  json line{{"pipeline", spec->name}};
  try {
    const auto est = run_pipeline(spec->name, trace.data);
    line["bpm"] = est.bpm;
    line["quality"] = est.quality;
    line["valid"] = est.valid;
    line["source"] = est.source;
  } catch (const vitals::VitalsError& e) {
    line["bpm"] = 0.0;
    line["quality"] = 0.0;
    line["valid"] = false;
    line["error"] = vitals::to_string(e.code());
  }
  out << line.dump() << "\n";
  return kOk;
}

int cmd_synth(const SynthConfig& config, std::ostream& out, std::ostream& err) {
  vitals::Trace trace;
  try {
    trace.modality = vitals::modality_from_string(config.modality);
  } catch (const std::exception&) {
    err << "unknown modality '" << config.modality << "'; available: mmwave rgb pcr thermal\n";
    return kUsage;
  }
  try {
    if (config.noise_only) {
      if (trace.modality != vitals::Modality::Mmwave && trace.modality != vitals::Modality::Pcr) {
        err << "--noise-only supports mmwave and pcr\n";
        return kUsage;
      }
      const auto d = vitals::modality_defaults(trace.modality);
      const double duration = config.duration > 0.0 ? config.duration : d.duration;
      const auto n = static_cast<Eigen::Index>(std::lround(duration * d.fs));
      trace.data = vitals::SampleSeries::uniform(vitals::white_noise(n, config.seed), d.fs);
    } else {
      vitals::SynthParams p;
      p.hr_bpm = config.hr_bpm;
      p.rr_bpm = config.rr_bpm;
      p.modality = trace.modality;
      p.snr_db = config.snr_db;
      p.seed = config.seed;
      p.duration = config.duration;
      trace.data = vitals::synth_vital_signal(p);
    }
  } catch (const vitals::VitalsError& e) {
    err << "synth error: " << e.what() << "\n";
    return kUsage;
  }
  if (config.out.empty() || config.out == "-") {
    vitals::write_trace(out, trace);
    return kOk;
  }
  try {
    vitals::save_trace(config.out, trace);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

int cmd_serve(const ServeConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>& stop) {
  if (config.port < 0 || config.port > 65535) {
    err << "invalid port " << config.port << "\n";
    return kUsage;
  }
  std::unique_ptr<service::LiveSim> sim;
  try {
    auto scenario = sim::load_scenario_file(config.scenario, parse_overrides(config.overrides, ""));
    sim = std::make_unique<service::LiveSim>(std::move(scenario), service::LiveOptions{config.pace, 5.0, !config.manual});
  } catch (const sim::ScenarioError& e) {
    err << "scenario error: " << e.what() << "\n";
    return kScenarioError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  service::GatewayOptions opts;
  opts.address = config.address;
  opts.port = static_cast<std::uint16_t>(config.port);
  opts.scenario_name = fs::path(config.scenario).stem().string();
  service::Gateway gateway(*sim, opts);
  try {
    gateway.start();
  } catch (const service::BindError& e) {
    err << "bind error: " << e.what() << "\n";
    return kBindError;
  }
  out << "listening on " << config.address << ":" << gateway.port() << " (pace " << config.pace << ")" << std::endl;
  sim->start();
  while (!stop.load() && !(config.exit_on_finish && sim->done())) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  gateway.stop();
  sim->stop();
  return kOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::atomic<bool>& stop) {
  CLI::App app{"Casualty triage simulation and vitals tools", "triage"};
  app.require_subcommand(1);
  app.set_version_flag("--version", service::version());

  RunConfig run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario headless and write scorecards, metrics and events");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file")->required();
  run_cmd->add_option("--script", run.script, "\"auto\" or a command script")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--mode", run.mode, "Fusion rules")->check(CLI::IsMember({"year1", "year2"}));
  run_cmd->add_option("--override", run.overrides, "key=value, dotted scenario path")->take_all();

  VitalsConfig vit;
  auto* vitals_cmd = app.add_subcommand("vitals", "Run one estimation pipeline on a trace file");
  vitals_cmd->add_option("--trace", vit.trace, "Trace CSV")->required();
  vitals_cmd->add_option("--pipeline", vit.pipeline, "rppg_hr, mmwave_hr, mmwave_rr, pcr_rr or lwir_rr")->required();

  SynthConfig syn;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic trace");
  synth_cmd->add_option("--modality", syn.modality)->capture_default_str();
  synth_cmd->add_option("--hr", syn.hr_bpm)->capture_default_str();
  synth_cmd->add_option("--rr", syn.rr_bpm)->capture_default_str();
  synth_cmd->add_option("--snr", syn.snr_db, "dB; inf for a clean trace")->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed)->capture_default_str();
  synth_cmd->add_option("--duration", syn.duration, "Seconds; 0 for the modality default");
  synth_cmd->add_flag("--noise-only", syn.noise_only);
  synth_cmd->add_option("--out", syn.out, "Output file, - for stdout");

  ServeConfig srv;
  auto* serve_cmd = app.add_subcommand("serve", "Serve a live paced run over WebSocket");
  serve_cmd->add_option("--scenario", srv.scenario, "Scenario file")->required();
  serve_cmd->add_option("--address", srv.address)->capture_default_str();
  serve_cmd->add_option("--port", srv.port)->capture_default_str();
  serve_cmd->add_option("--pace", srv.pace, "Simulated seconds per wall second, 0 unpaced")->capture_default_str();
  serve_cmd->add_option("--override", srv.overrides, "key=value, dotted scenario path")->take_all();
  serve_cmd->add_flag("--manual", srv.manual, "Disable the automatic dispatch policy");
  serve_cmd->add_flag("--exit-on-finish", srv.exit_on_finish);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*vitals_cmd) return cmd_vitals(vit, out, err);
    if (*synth_cmd) return cmd_synth(syn, out, err);
    if (*serve_cmd) return cmd_serve(srv, out, err, stop);
  } catch (const sim::SchemaError& e) {
    // malformed --override
    err << "scenario error: " << e.what() << "\n";
    return kScenarioError;
  }
  return kUsage;
}

}  // namespace triage::cli
