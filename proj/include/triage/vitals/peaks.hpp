#pragma once

#include <vector>

#include "triage/vitals/series.hpp"

namespace triage::vitals {

/// Local maxima (plateaus resolve to their middle sample) whose topographic
/// prominence is at least `min_prominence * (max - min)`, thinned greedily by
/// height so that kept peaks are at least `min_spacing` seconds apart.
/// Returned indices are ascending.
std::vector<Eigen::Index> find_peaks(const SampleSeries& s, double min_spacing,
                                     double min_prominence);

/// Topographic prominence of each candidate index.
std::vector<double> peak_prominences(const Eigen::VectorXd& x,
                                     const std::vector<Eigen::Index>& peaks);

/// 60 / mean inter-peak interval. Throws TooFewPeaks below two peaks.
double rate_from_peaks(const std::vector<Eigen::Index>& indices,
                       const Eigen::VectorXd& timestamps);

}  // namespace triage::vitals
