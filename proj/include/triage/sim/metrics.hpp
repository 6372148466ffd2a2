#pragma once

#include <string>

#include <json.hpp>

#include "triage/sim/world.hpp"

namespace triage::sim {

/// Summary of a finished run:
/// - localization_rmse / localization_mean_error: horizontal distance from
///   each map estimate to its nearest true casualty;
/// - cluster_count / cluster_count_error: map size against the number of
///   true casualties;
/// - hr_mae / rr_mae: basestation scorecards against the truth nearest to the
///   scored casualty's estimate (manikin heart rates excluded);
/// - latency: delivery latency of scorecards to the basestation;
/// - classification: per-field and overall classifier accuracy.
nlohmann::json compute_metrics(const World& world);

/// Localization RMSE recomputed from an event log alone (start and
/// final_map records).
double localization_rmse_from_log(const std::string& log_text);

}  // namespace triage::sim
