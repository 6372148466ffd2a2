#include "triage/vitals/thermal.hpp"

#include <cmath>
#include <vector>

#include "triage/vitals/filter.hpp"
#include "triage/vitals/peaks.hpp"

namespace triage::vitals {

ThermalEstimate estimate_rr_thermal(const ThermalRoiTrace& trace, const ThermalParams& params) {
  trace.validate();
  const Eigen::Index n = trace.size();

  std::vector<Eigen::Index> kept;
  double conf_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (trace.displacement[i] <= params.motion_threshold && trace.confidence[i] >= params.conf_min) {
      kept.push_back(i);
      conf_sum += trace.confidence[i];
    }
  }
  const auto n_kept = static_cast<Eigen::Index>(kept.size());
  if (2 * n_kept < n || n_kept < 2) {
    throw VitalsError(VitalsErrc::InsufficientStableFrames, "fewer than half the frames pass the gates");
  }

  ThermalEstimate out;
  out.gated_fraction = 1.0 - static_cast<double>(n_kept) / static_cast<double>(n);
  out.stable = out.gated_fraction < 0.2;
  out.averaged = RateEstimate::invalid("lwir");

  SampleSeries stable;
  stable.timestamps.resize(n_kept);
  stable.values.resize(n_kept);
  for (Eigen::Index j = 0; j < n_kept; ++j) {
    stable.timestamps[j] = trace.timestamps[kept[static_cast<std::size_t>(j)]];
    stable.values[j] = trace.intensity[kept[static_cast<std::size_t>(j)]];
  }
  const SampleSeries u = resample_uniform(stable);
  const double fs = u.sample_rate_hint;

  const auto half = [fs](double seconds) {
    return static_cast<Eigen::Index>(std::lround(0.5 * seconds * fs));
  };
  SampleSeries signal = u;
  signal.values = u.values - centered_moving_average(u.values, half(params.baseline_window));
  signal.values = centered_moving_average(signal.values, half(params.smooth_window));

  const SpectralPeak spec = spectral_peak(u, params.band);
  out.amplitude = spec.amplitude;
  out.averaged.quality = spec.quality;

  const double mean_conf = conf_sum / static_cast<double>(n_kept);
  const double prominence = params.prominence * (1.5 - 0.5 * mean_conf);
  const auto peaks = find_peaks(signal, params.min_spacing, prominence);
  if (peaks.size() < 2) {
    return out;
  }

  // an interval is clean when no gated frame falls strictly inside it
  double clean_sum = 0.0;
  int clean_count = 0;
  std::size_t next_gated = 0;
  std::vector<double> gated_times;
  for (Eigen::Index i = 0, j = 0; i < n; ++i) {
    if (j < n_kept && kept[static_cast<std::size_t>(j)] == i) {
      ++j;
    } else {
      gated_times.push_back(trace.timestamps[i]);
    }
  }
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const double ta = signal.timestamps[peaks[k - 1]];
    const double tb = signal.timestamps[peaks[k]];
    while (next_gated < gated_times.size() && gated_times[next_gated] <= ta) {
      ++next_gated;
    }
    const bool spans_gap = next_gated < gated_times.size() && gated_times[next_gated] < tb;
    if (!spans_gap) {
      clean_sum += tb - ta;
      ++clean_count;
    }
  }
  const double last = signal.timestamps[peaks.back()] - signal.timestamps[peaks[peaks.size() - 2]];
  out.instantaneous_bpm = 60.0 / last;
  if (clean_count == 0) {
    return out;
  }
  out.averaged.bpm = 60.0 * clean_count / clean_sum;
  const bool in_band = clamp_to_band(out.averaged.bpm, params.band, u.duration());
  out.averaged.valid = out.amplitude >= params.amplitude_floor && spec.quality >= params.q_min && in_band;
  return out;
}

}  // namespace triage::vitals
