#include "triage/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace triage::sim {

namespace {

namespace field = orchestrator::field;

// A YAML node together with its dotted path, for error messages.
class Reader {
 public:
  Reader(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull(); }

  Reader child(const std::string& key) const {
    if (!has(key)) throw SchemaError(sub(key), "required field missing");
    return Reader(node_[key], sub(key));
  }

  Reader map(const std::string& key) const {
    Reader r = child(key);
    if (!r.node_.IsMap()) throw SchemaError(r.path_, "expected a mapping");
    return r;
  }

  std::vector<Reader> list(const std::string& key) const {
    Reader r = child(key);
    if (!r.node_.IsSequence()) throw SchemaError(r.path_, "expected a list");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < r.node_.size(); ++i) {
      out.emplace_back(r.node_[i], r.path_ + "." + std::to_string(i));
    }
    return out;
  }

  template <typename T>
  T get(const std::string& key) const {
    const Reader r = child(key);
    return r.as<T>();
  }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  template <typename T>
  T as() const {
    if (!node_.IsScalar()) throw SchemaError(path_, "expected a scalar");
    try {
      return node_.as<T>();
    } catch (const YAML::Exception&) {
      throw SchemaError(path_, "cannot parse '" + node_.Scalar() + "'");
    }
  }

  /// Rejects keys outside `allowed`.
  void only(std::initializer_list<const char*> allowed) const {
    if (!node_.IsMap()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) throw SchemaError(sub(key), "unknown field");
    }
  }

  /// [x, y] or [x, y, z]; a missing z becomes `z_default`.
  Eigen::Vector3d point(const std::string& key, double z_default) const {
    const Reader r = child(key);
    if (!r.node_.IsSequence() || r.node_.size() < 2 || r.node_.size() > 3) {
      throw SchemaError(r.path_, "expected [x, y] or [x, y, z]");
    }
    Eigen::Vector3d p(0, 0, z_default);
    for (std::size_t i = 0; i < r.node_.size(); ++i) {
      p[static_cast<Eigen::Index>(i)] = Reader(r.node_[i], r.path_ + "." + std::to_string(i)).as<double>();
    }
    return p;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw SchemaError(path, message);
}

std::map<std::string, bool> read_labels(const Reader& c) {
  std::map<std::string, bool> labels{
      {field::kTraumaHead, false},       {field::kTraumaTorso, false},  {field::kTraumaUpper, false},
      {field::kTraumaLower, false},      {field::kSevereHemorrhage, false}, {field::kRespiratoryDistress, false},
      {field::kAlertOcular, true},       {field::kAlertVerbal, true},   {field::kAlertMotor, true},
  };
  if (!c.has("labels")) return labels;
  const Reader l = c.map("labels");
  l.only({"trauma", "severe_hemorrhage", "respiratory_distress", "alertness"});
  if (l.has("trauma")) {
    const Reader t = l.map("trauma");
    t.only({"head", "torso", "upper_extremity", "lower_extremity"});
    for (const char* k : {"head", "torso", "upper_extremity", "lower_extremity"}) {
      labels[std::string("trauma.") + k] = t.get<bool>(k, false);
    }
  }
  labels[field::kSevereHemorrhage] = l.get<bool>("severe_hemorrhage", false);
  labels[field::kRespiratoryDistress] = l.get<bool>("respiratory_distress", false);
  if (l.has("alertness")) {
    const Reader a = l.map("alertness");
    a.only({"ocular", "verbal", "motor"});
    for (const char* k : {"ocular", "verbal", "motor"}) {
      labels[std::string("alertness.") + k] = a.get<bool>(k, true);
    }
  }
  return labels;
}

RobotSpec read_robot(const Reader& r, double ground_z) {
  r.only({"id", "kind", "start", "heading", "speed", "altitude", "lane_overlap", "camera"});
  RobotSpec s;
  s.id = r.get<std::string>("id");
  require(!s.id.empty() && s.id != kBasestation, r.sub("id"), "invalid robot id '" + s.id + "'");
  const auto kind = r.get<std::string>("kind");
  if (kind == "uav") {
    s.kind = RobotKind::Uav;
  } else if (kind == "ugv") {
    s.kind = RobotKind::Ugv;
  } else {
    throw SchemaError(r.sub("kind"), "expected uav or ugv");
  }
  s.altitude = r.get<double>("altitude", s.altitude);
  s.start = r.point("start", ground_z);
  if (s.kind == RobotKind::Uav) s.start.z() = ground_z + s.altitude;
  s.heading = r.get<double>("heading", 0.0);
  s.speed = r.get<double>("speed", s.kind == RobotKind::Uav ? 5.0 : 1.0);
  s.lane_overlap = r.get<double>("lane_overlap", s.lane_overlap);
  require(s.speed > 0.0, r.sub("speed"), "must be positive");
  require(s.altitude > 0.0, r.sub("altitude"), "must be positive");
  require(s.lane_overlap >= 0.0 && s.lane_overlap < 1.0, r.sub("lane_overlap"), "must be in [0, 1)");
  if (r.has("camera")) {
    const Reader c = r.map("camera");
    c.only({"fx", "fy", "cx", "cy", "width", "height"});
    s.camera = {c.get<double>("fx"),    c.get<double>("fy"),    c.get<double>("cx"),
                c.get<double>("cy"), c.get<double>("width"), c.get<double>("height")};
    require(s.camera.valid(), c.path(), "invalid intrinsics");
  }
  return s;
}

// Sets `value` at a dotted path, creating mappings as needed. Sequence
// elements must already exist.
void set_path(YAML::Node root, const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw SchemaError(key, "empty path segment");
    parts.push_back(part);
  }
  if (parts.empty()) throw SchemaError(key, "empty override key");
  YAML::Node node = root;
  std::string path;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    path += (path.empty() ? "" : ".") + p;
    const bool last = i + 1 == parts.size();
    YAML::Node next;
    if (node.IsSequence()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw SchemaError(path, "expected a list index");
      }
      if (idx >= node.size()) throw SchemaError(path, "index out of range");
      if (last) {
        node[idx] = YAML::Load(value);
        return;
      }
      next.reset(node[idx]);
    } else {
      if (last) {
        node[p] = YAML::Load(value);
        return;
      }
      if (!node[p].IsDefined() || node[p].IsNull()) node[p] = YAML::Node(YAML::NodeType::Map);
      next.reset(node[p]);
    }
    node.reset(next);
  }
}

Scenario build(const Reader& root) {
  root.only({"scenario_version", "seed", "mode", "sim", "field", "basestation", "link", "detection", "classifiers",
             "vitals", "plugins", "casualties", "robots", "blackouts"});
  Scenario s;
  const int version = root.get<int>("scenario_version");
  require(version == kScenarioVersion, "scenario_version", "unsupported version " + std::to_string(version));
  s.seed = root.get<std::uint64_t>("seed");
  if (root.has("mode")) {
    try {
      s.mode = orchestrator::mode_from_string(root.get<std::string>("mode"));
    } catch (const orchestrator::OrchestratorError& e) {
      throw SchemaError("mode", e.what());
    }
  }

  const Reader sim = root.map("sim");
  sim.only({"dt", "duration", "ground_z"});
  s.dt = sim.get<double>("dt", s.dt);
  s.duration = sim.get<double>("duration");
  s.ground_z = sim.get<double>("ground_z", 0.0);
  require(s.dt > 0.0, "sim.dt", "must be positive");
  require(s.duration > 0.0, "sim.duration", "must be positive");
  require(s.duration / s.dt <= 1e7, "sim.duration", "too many steps");

  const Reader f = root.map("field");
  f.only({"width", "height"});
  s.field_width = f.get<double>("width");
  s.field_height = f.get<double>("height");
  require(s.field_width > 0.0, "field.width", "must be positive");
  require(s.field_height > 0.0, "field.height", "must be positive");

  const Reader bs = root.map("basestation");
  bs.only({"position"});
  s.basestation = bs.point("position", s.ground_z);

  if (root.has("link")) {
    const Reader l = root.map("link");
    l.only({"range_0db", "threshold", "sync_interval"});
    s.link.range_0db = l.get<double>("range_0db", s.link.range_0db);
    s.link.threshold = l.get<double>("threshold", s.link.threshold);
    s.link.sync_interval = l.get<double>("sync_interval", s.link.sync_interval);
  }
  require(s.link.range_0db > 0.0, "link.range_0db", "must be positive");
  require(s.link.threshold > 0.0 && s.link.threshold <= 1.0, "link.threshold", "must be in (0, 1]");
  require(s.link.sync_interval > 0.0, "link.sync_interval", "must be positive");

  if (root.has("detection")) {
    const Reader d = root.map("detection");
    d.only({"p_det", "sigma_px", "rate_hz"});
    s.detection.p_det = d.get<double>("p_det", s.detection.p_det);
    s.detection.sigma_px = d.get<double>("sigma_px", s.detection.sigma_px);
    s.detection.rate_hz = d.get<double>("rate_hz", s.detection.rate_hz);
  }
  require(s.detection.p_det >= 0.0 && s.detection.p_det <= 1.0, "detection.p_det", "must be in [0, 1]");
  require(s.detection.sigma_px >= 0.0, "detection.sigma_px", "must be non-negative");
  require(s.detection.rate_hz > 0.0, "detection.rate_hz", "must be positive");

  if (root.has("classifiers")) {
    const Reader c = root.map("classifiers");
    c.only({"accuracy"});
    s.classifier_accuracy = c.get<double>("accuracy", s.classifier_accuracy);
  }
  require(s.classifier_accuracy >= 0.0 && s.classifier_accuracy <= 1.0, "classifiers.accuracy",
          "must be in [0, 1]");

  if (root.has("vitals")) {
    const Reader v = root.map("vitals");
    v.only({"snr_db", "thermal_drift_per_s", "motion_episodes_per_min"});
    s.vitals.snr_db = v.get<double>("snr_db", s.vitals.snr_db);
    s.vitals.thermal_drift_per_s = v.get<double>("thermal_drift_per_s", 0.0);
    s.vitals.motion_episodes_per_min = v.get<double>("motion_episodes_per_min", 0.0);
    require(s.vitals.motion_episodes_per_min >= 0.0, "vitals.motion_episodes_per_min", "must be non-negative");
  }

  s.plugins = default_plugins();
  if (root.has("plugins")) {
    const Reader p = root.map("plugins");
    for (const auto& kv : p.node()) {
      const auto name = kv.first.as<std::string>();
      const auto it = s.plugins.find(name);
      if (it == s.plugins.end()) throw SchemaError(p.sub(name), "unknown plugin");
      const Reader spec = p.map(name);
      spec.only({"enabled", "timeout", "elapsed"});
      it->second.enabled = spec.get<bool>("enabled", it->second.enabled);
      it->second.timeout = spec.get<double>("timeout", it->second.timeout);
      it->second.elapsed = spec.get<double>("elapsed", it->second.elapsed);
      require(it->second.timeout > 0.0, spec.sub("timeout"), "must be positive");
      require(it->second.elapsed >= 0.0, spec.sub("elapsed"), "must be non-negative");
    }
  }

  for (const auto& c : root.list("casualties")) {
    c.only({"position", "hr_bpm", "rr_bpm", "manikin", "labels"});
    CasualtyTruth t;
    t.position = c.point("position", s.ground_z);
    t.manikin = c.get<bool>("manikin", false);
    t.hr_bpm = t.manikin ? c.get<double>("hr_bpm", 0.0) : c.get<double>("hr_bpm");
    t.rr_bpm = c.get<double>("rr_bpm");
    if (!t.manikin) require(t.hr_bpm >= 30.0 && t.hr_bpm <= 200.0, c.sub("hr_bpm"), "must be in [30, 200]");
    require(t.rr_bpm >= 4.0 && t.rr_bpm <= 40.0, c.sub("rr_bpm"), "must be in [4, 40]");
    t.labels = read_labels(c);
    if (!(t.position.x() >= 0.0 && t.position.x() <= s.field_width && t.position.y() >= 0.0 &&
          t.position.y() <= s.field_height)) {
      std::ostringstream msg;
      msg << c.path() << ": casualty at (" << t.position.x() << ", " << t.position.y() << ") outside the "
          << s.field_width << " x " << s.field_height << " field";
      throw BoundsError(msg.str());
    }
    s.casualties.push_back(std::move(t));
  }

  std::set<std::string> ids;
  for (const auto& r : root.list("robots")) {
    RobotSpec spec = read_robot(r, s.ground_z);
    require(ids.insert(spec.id).second, r.sub("id"), "duplicate robot id '" + spec.id + "'");
    s.robots.push_back(std::move(spec));
  }

  if (root.has("blackouts")) {
    for (const auto& b : root.list("blackouts")) {
      b.only({"node", "start", "end"});
      Blackout out{b.get<std::string>("node"), b.get<double>("start"), b.get<double>("end")};
      require(out.node == kBasestation || ids.count(out.node), b.sub("node"), "unknown node '" + out.node + "'");
      require(out.end > out.start, b.sub("end"), "must be after start");
      s.blackouts.push_back(std::move(out));
    }
  }
  return s;
}

}  // namespace

const char* to_string(RobotKind kind) { return kind == RobotKind::Uav ? "uav" : "ugv"; }

long Scenario::total_steps() const { return std::lround(duration / dt); }

const RobotSpec* Scenario::robot(const std::string& id) const {
  for (const auto& r : robots) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const std::map<std::string, PluginSpec>& default_plugins() {
  static const std::map<std::string, PluginSpec> plugins{
      {orchestrator::plugin::kLwir, {true, orchestrator::kDefaultTimeout, 12.0}},
      {orchestrator::plugin::kMmwave, {true, orchestrator::kDefaultTimeout, 12.0}},
      {orchestrator::plugin::kPcr, {true, orchestrator::kDefaultTimeout, 12.0}},
      {orchestrator::plugin::kMtts, {true, orchestrator::kDefaultTimeout, 12.0}},
      {orchestrator::plugin::kTrauma, {true, orchestrator::kDefaultTimeout, 4.0}},
      {orchestrator::plugin::kDistress, {true, orchestrator::kDefaultTimeout, 4.0}},
      {orchestrator::plugin::kAlertness, {true, orchestrator::kDefaultTimeout, 4.0}},
  };
  return plugins;
}

Scenario load_scenario(const std::string& text, const std::vector<Override>& overrides) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw SchemaError("<document>", std::string("malformed YAML: ") + e.what());
  }
  if (!doc.IsMap()) throw SchemaError("<document>", "expected a mapping at the top level");
  for (const auto& [key, value] : overrides) {
    try {
      set_path(doc, key, value);
    } catch (const YAML::Exception& e) {
      throw SchemaError(key, std::string("bad override value: ") + e.what());
    }
  }
  return build(Reader(doc, ""));
}

Scenario load_scenario_file(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str(), overrides);
}

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw SchemaError(text, "override must be key=value");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

}  // namespace triage::sim
