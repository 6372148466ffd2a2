#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "triage/meshsync/store.hpp"
#include "triage/orchestrator/fusion.hpp"
#include "triage/orchestrator/plugin.hpp"

namespace triage::orchestrator {

inline constexpr int kScorecardVersion = 1;
inline constexpr const char* kScorecardStream = "scorecard";

struct Trauma {
  std::optional<bool> head;
  std::optional<bool> torso;
  std::optional<bool> upper_extremity;
  std::optional<bool> lower_extremity;

  bool operator==(const Trauma&) const = default;
};

/// true = normal response.
struct Alertness {
  std::optional<bool> ocular;
  std::optional<bool> verbal;
  std::optional<bool> motor;

  bool operator==(const Alertness&) const = default;
};

struct Scorecard {
  CasualtyId casualty_id{0};
  std::optional<double> heart_rate_bpm;
  std::optional<double> respiration_bpm;
  Trauma trauma;
  std::optional<bool> severe_hemorrhage;
  std::optional<bool> respiratory_distress;
  Alertness alertness;
  std::optional<std::string> description;
  /// Field key -> plugin that produced it.
  std::map<std::string, std::string> sources;
  double assessed_at{0.0};
  std::string assessed_by;

  /// Number of populated fields.
  std::size_t populated() const;
  std::optional<bool> flag(const std::string& key) const;

  bool operator==(const Scorecard&) const = default;
};

/// Boolean classifier value with its producer.
struct ClassifierOutput {
  std::string field;
  bool value{false};
  std::string plugin;
};

/// Boolean values of completed results, in result order. When two plugins
/// produce the same field the first one wins.
std::vector<ClassifierOutput> collect_classifiers(const std::vector<PluginResult>& results);

/// Text values of completed results as (plugin, text), in result order.
std::vector<std::pair<std::string, std::string>> collect_descriptions(const std::vector<PluginResult>& results);

struct ScorecardContext {
  double assessed_at{0.0};
  std::string assessed_by;
  /// Non-animated manikin: heart rate is reported as zero.
  bool manikin{false};
};

/// Pure construction. Throws UnknownCasualty when `casualty_id` is not in
/// `map`.
Scorecard make_scorecard(CasualtyId casualty_id, const geoloc::CasualtyMap& map, const FusedVitals& vitals,
                         const std::vector<ClassifierOutput>& classifiers,
                         const std::vector<std::pair<std::string, std::string>>& descriptions,
                         const ScorecardContext& context);

nlohmann::json to_json(const Scorecard& card);
Scorecard scorecard_from_json(const nlohmann::json& j);

/// Canonical byte form: key-sorted compact JSON.
std::string canonical_json(const Scorecard& card);

}  // namespace triage::orchestrator
