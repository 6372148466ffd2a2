#include "triage/vitals/peaks.hpp"

#include <algorithm>
#include <numeric>

namespace triage::vitals {

namespace {

std::vector<Eigen::Index> local_maxima(const Eigen::VectorXd& x) {
  std::vector<Eigen::Index> out;
  const Eigen::Index n = x.size();
  Eigen::Index i = 1;
  while (i < n - 1) {
    if (x[i - 1] < x[i]) {
      Eigen::Index ahead = i + 1;
      while (ahead < n - 1 && x[ahead] == x[i]) {
        ++ahead;
      }
      if (x[ahead] < x[i]) {
        out.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return out;
}

}  // namespace

std::vector<double> peak_prominences(const Eigen::VectorXd& x,
                                     const std::vector<Eigen::Index>& peaks) {
  std::vector<double> prom;
  prom.reserve(peaks.size());
  const Eigen::Index n = x.size();
  for (const Eigen::Index p : peaks) {
    double left_min = x[p];
    for (Eigen::Index j = p - 1; j >= 0 && x[j] <= x[p]; --j) {
      left_min = std::min(left_min, x[j]);
    }
    double right_min = x[p];
    for (Eigen::Index j = p + 1; j < n && x[j] <= x[p]; ++j) {
      right_min = std::min(right_min, x[j]);
    }
    prom.push_back(x[p] - std::max(left_min, right_min));
  }
  return prom;
}

std::vector<Eigen::Index> find_peaks(const SampleSeries& s, double min_spacing,
                                     double min_prominence) {
  if (!(min_spacing > 0.0)) {
    throw VitalsError(VitalsErrc::ParamOutOfRange, "min_spacing must be positive");
  }
  const Eigen::VectorXd& x = s.values;
  if (x.size() < 3) {
    return {};
  }
  const double range = x.maxCoeff() - x.minCoeff();
  if (!(range > 0.0)) {
    return {};
  }
  const double threshold = min_prominence * range;

  const auto candidates = local_maxima(x);
  const auto prom = peak_prominences(x, candidates);
  std::vector<Eigen::Index> kept_prom;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (prom[i] >= threshold) {
      kept_prom.push_back(candidates[i]);
    }
  }

  // tallest first; earlier index breaks ties so the result is deterministic
  std::vector<Eigen::Index> order = kept_prom;
  std::stable_sort(order.begin(), order.end(),
                   [&x](Eigen::Index a, Eigen::Index b) { return x[a] > x[b]; });
  std::vector<Eigen::Index> selected;
  for (const Eigen::Index p : order) {
    const bool clear = std::all_of(selected.begin(), selected.end(), [&](Eigen::Index q) {
      return std::abs(s.timestamps[p] - s.timestamps[q]) >= min_spacing;
    });
    if (clear) {
      selected.push_back(p);
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

double rate_from_peaks(const std::vector<Eigen::Index>& indices,
                       const Eigen::VectorXd& timestamps) {
  if (indices.size() < 2) {
    throw VitalsError(VitalsErrc::TooFewPeaks, "need at least two peaks");
  }
  const double span = timestamps[indices.back()] - timestamps[indices.front()];
  if (!(span > 0.0)) {
    throw VitalsError(VitalsErrc::TooFewPeaks, "peaks do not span a positive interval");
  }
  return 60.0 * static_cast<double>(indices.size() - 1) / span;
}

}  // namespace triage::vitals
