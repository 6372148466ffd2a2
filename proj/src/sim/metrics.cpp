#include "triage/sim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace triage::sim {

namespace {

using json = nlohmann::json;
namespace orch = orchestrator;

double horizontal(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return (a - b).head<2>().norm(); }

// Distance from each estimate to its nearest truth, in estimate order.
std::vector<double> localization_errors(const std::vector<Eigen::Vector3d>& estimates,
                                        const std::vector<Eigen::Vector3d>& truth) {
  std::vector<double> out;
  for (const auto& e : estimates) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : truth) best = std::min(best, horizontal(e, t));
    out.push_back(best);
  }
  return out;
}

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

json summary(std::vector<double> v) {
  if (v.empty()) return json{{"count", 0}};
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return json{{"count", n}, {"min", v.front()}, {"max", v.back()}, {"mean", mean(v)}, {"median", median},
              {"values", v}};
}

Eigen::Vector3d point(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

json compute_metrics(const World& world) {
  const Scenario& s = world.scenario();
  const auto& map = world.casualty_map();
  json m;

  std::vector<Eigen::Vector3d> truth;
  for (const auto& c : s.casualties) truth.push_back(c.position);
  std::vector<Eigen::Vector3d> est;
  for (const auto& e : map.estimates()) est.push_back(e.position);

  m["cluster_count"] = map.size();
  m["casualty_count"] = s.casualties.size();
  m["cluster_count_error"] = std::abs(static_cast<long>(map.size()) - static_cast<long>(s.casualties.size()));
  if (!est.empty() && !truth.empty()) {
    const auto err = localization_errors(est, truth);
    m["localization_rmse"] = rms(err);
    m["localization_mean_error"] = mean(err);
  } else {
    m["localization_rmse"] = nullptr;
    m["localization_mean_error"] = nullptr;
  }

  std::vector<double> hr_err;
  std::vector<double> rr_err;
  std::map<std::string, std::pair<int, int>> fields;  // correct, total
  std::set<CasualtyId> scored;
  const auto cards = world.basestation_scorecards();
  for (const auto& card : cards) {
    scored.insert(card.casualty_id);
    const auto* e = map.find(card.casualty_id);
    if (e == nullptr) continue;
    const auto idx = world.nearest_truth(e->position, std::numeric_limits<double>::infinity());
    if (!idx) continue;
    const auto& t = s.casualties[*idx];
    if (card.heart_rate_bpm && !t.manikin) hr_err.push_back(std::abs(*card.heart_rate_bpm - t.hr_bpm));
    if (card.respiration_bpm) rr_err.push_back(std::abs(*card.respiration_bpm - t.rr_bpm));
    for (const auto& f : orch::classifier_fields()) {
      const auto v = card.flag(f);
      if (!v) continue;
      auto& [ok, total] = fields[f];
      ok += *v == t.labels.at(f) ? 1 : 0;
      ++total;
    }
  }
  m["hr_mae"] = hr_err.empty() ? json(nullptr) : json(mean(hr_err));
  m["rr_mae"] = rr_err.empty() ? json(nullptr) : json(mean(rr_err));
  m["hr_scored"] = hr_err.size();
  m["rr_scored"] = rr_err.size();

  json cls = json::object();
  int ok_all = 0;
  int total_all = 0;
  for (const auto& [f, counts] : fields) {
    cls[f] = {{"correct", counts.first}, {"total", counts.second},
              {"accuracy", static_cast<double>(counts.first) / counts.second}};
    ok_all += counts.first;
    total_all += counts.second;
  }
  m["classification"] = {{"fields", cls},
                         {"correct", ok_all},
                         {"total", total_all},
                         {"accuracy", total_all > 0 ? json(static_cast<double>(ok_all) / total_all) : json(nullptr)}};

  std::vector<double> latency;
  for (const auto& d : world.deliveries()) latency.push_back(d.delivered_at - d.created_at);
  m["latency"] = summary(latency);
  m["scorecards_built"] = world.scorecards_built();
  m["scorecards_delivered"] = cards.size();
  m["casualties_scored"] = scored.size();
  return m;
}

double localization_rmse_from_log(const std::string& log_text) {
  std::vector<Eigen::Vector3d> truth;
  std::vector<Eigen::Vector3d> est;
  std::istringstream in(log_text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "start") {
      for (const auto& c : j.at("casualties")) truth.push_back(point(c.at("position")));
    } else if (kind == "final_map") {
      for (const auto& e : j.at("estimates")) est.push_back(point(e.at("position")));
    }
  }
  if (est.empty() || truth.empty()) return std::numeric_limits<double>::quiet_NaN();
  return rms(localization_errors(est, truth));
}

}  // namespace triage::sim
