#include "triage/orchestrator/scorecard.hpp"

#include <cmath>

namespace triage::orchestrator {

namespace {

using json = nlohmann::json;

constexpr const char* kManikinNote = "non-animated manikin, heart rate reported as 0";

// Resolution of reported rates.
double round_bpm(double bpm) { return std::round(bpm * 100.0) / 100.0; }

std::optional<bool>* flag_slot(Scorecard& c, const std::string& key) {
  if (key == field::kTraumaHead) return &c.trauma.head;
  if (key == field::kTraumaTorso) return &c.trauma.torso;
  if (key == field::kTraumaUpper) return &c.trauma.upper_extremity;
  if (key == field::kTraumaLower) return &c.trauma.lower_extremity;
  if (key == field::kSevereHemorrhage) return &c.severe_hemorrhage;
  if (key == field::kRespiratoryDistress) return &c.respiratory_distress;
  if (key == field::kAlertOcular) return &c.alertness.ocular;
  if (key == field::kAlertVerbal) return &c.alertness.verbal;
  if (key == field::kAlertMotor) return &c.alertness.motor;
  return nullptr;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

}  // namespace

std::size_t Scorecard::populated() const {
  std::size_t n = (heart_rate_bpm ? 1 : 0) + (respiration_bpm ? 1 : 0) + (description ? 1 : 0);
  for (const auto& key : classifier_fields()) {
    n += flag(key) ? 1 : 0;
  }
  return n;
}

std::optional<bool> Scorecard::flag(const std::string& key) const {
  auto* slot = flag_slot(const_cast<Scorecard&>(*this), key);
  return slot ? *slot : std::nullopt;
}

std::vector<ClassifierOutput> collect_classifiers(const std::vector<PluginResult>& results) {
  std::vector<ClassifierOutput> out;
  for (const auto& r : results) {
    if (!r.completed) continue;
    for (const auto& [key, value] : r.values) {
      if (const bool* b = std::get_if<bool>(&value)) {
        out.push_back({key, *b, r.plugin});
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> collect_descriptions(const std::vector<PluginResult>& results) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : results) {
    if (!r.completed) continue;
    for (const auto& [key, value] : r.values) {
      if (const auto* s = std::get_if<std::string>(&value)) {
        out.emplace_back(r.plugin, *s);
      }
    }
  }
  return out;
}

Scorecard make_scorecard(CasualtyId casualty_id, const geoloc::CasualtyMap& map, const FusedVitals& vitals,
                         const std::vector<ClassifierOutput>& classifiers,
                         const std::vector<std::pair<std::string, std::string>>& descriptions,
                         const ScorecardContext& context) {
  if (!map.contains(casualty_id)) {
    throw UnknownCasualty(casualty_id);
  }
  Scorecard c;
  c.casualty_id = casualty_id;
  c.assessed_at = context.assessed_at;
  c.assessed_by = context.assessed_by;

  if (context.manikin) {
    c.heart_rate_bpm = 0.0;
    c.sources[field::kHeartRate] = plugin::kManikinRule;
  } else if (vitals.heart_rate.valid) {
    c.heart_rate_bpm = round_bpm(vitals.heart_rate.bpm);
    c.sources[field::kHeartRate] = vitals.heart_rate.source;
  }
  if (vitals.respiration.valid) {
    c.respiration_bpm = round_bpm(vitals.respiration.bpm);
    c.sources[field::kRespiration] = vitals.respiration.source;
  }
  for (const auto& out : classifiers) {
    auto* slot = flag_slot(c, out.field);
    if (slot == nullptr || slot->has_value()) continue;
    *slot = out.value;
    c.sources[out.field] = out.plugin;
  }

  std::string text;
  std::string by;
  const auto append = [&](const std::string& plugin, const std::string& s) {
    text += (text.empty() ? "" : "; ") + s;
    if (by.find(plugin) == std::string::npos) {
      by += (by.empty() ? "" : ",") + plugin;
    }
  };
  for (const auto& [plugin, s] : descriptions) {
    append(plugin, s);
  }
  if (context.manikin) {
    append(plugin::kManikinRule, kManikinNote);
  }
  if (!text.empty()) {
    c.description = text;
    c.sources[field::kDescription] = by;
  }
  return c;
}

json to_json(const Scorecard& c) {
  return json{
      {"scorecard_version", kScorecardVersion},
      {"casualty_id", c.casualty_id},
      {"heart_rate_bpm", opt(c.heart_rate_bpm)},
      {"respiration_bpm", opt(c.respiration_bpm)},
      {"trauma",
       {{"head", opt(c.trauma.head)},
        {"torso", opt(c.trauma.torso)},
        {"upper_extremity", opt(c.trauma.upper_extremity)},
        {"lower_extremity", opt(c.trauma.lower_extremity)}}},
      {"severe_hemorrhage", opt(c.severe_hemorrhage)},
      {"respiratory_distress", opt(c.respiratory_distress)},
      {"alertness",
       {{"ocular", opt(c.alertness.ocular)}, {"verbal", opt(c.alertness.verbal)}, {"motor", opt(c.alertness.motor)}}},
      {"description", opt(c.description)},
      {"sources", c.sources},
      {"assessed_at", c.assessed_at},
      {"assessed_by", c.assessed_by},
  };
}

Scorecard scorecard_from_json(const json& j) {
  if (j.at("scorecard_version").get<int>() != kScorecardVersion) {
    throw OrchestratorError("unsupported scorecard_version");
  }
  Scorecard c;
  c.casualty_id = j.at("casualty_id").get<CasualtyId>();
  c.heart_rate_bpm = get_opt<double>(j, "heart_rate_bpm");
  c.respiration_bpm = get_opt<double>(j, "respiration_bpm");
  const auto& t = j.at("trauma");
  c.trauma.head = get_opt<bool>(t, "head");
  c.trauma.torso = get_opt<bool>(t, "torso");
  c.trauma.upper_extremity = get_opt<bool>(t, "upper_extremity");
  c.trauma.lower_extremity = get_opt<bool>(t, "lower_extremity");
  c.severe_hemorrhage = get_opt<bool>(j, "severe_hemorrhage");
  c.respiratory_distress = get_opt<bool>(j, "respiratory_distress");
  const auto& a = j.at("alertness");
  c.alertness.ocular = get_opt<bool>(a, "ocular");
  c.alertness.verbal = get_opt<bool>(a, "verbal");
  c.alertness.motor = get_opt<bool>(a, "motor");
  c.description = get_opt<std::string>(j, "description");
  c.sources = j.at("sources").get<std::map<std::string, std::string>>();
  c.assessed_at = j.at("assessed_at").get<double>();
  c.assessed_by = j.at("assessed_by").get<std::string>();
  return c;
}

std::string canonical_json(const Scorecard& card) { return to_json(card).dump(); }

}  // namespace triage::orchestrator
