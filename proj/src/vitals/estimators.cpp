#include "triage/vitals/estimators.hpp"

#include <algorithm>

#include "triage/vitals/chrom.hpp"
#include "triage/vitals/filter.hpp"
#include "triage/vitals/peaks.hpp"

namespace triage::vitals {

namespace {

RateEstimate from_peak(const SpectralPeak& peak, const BandSpec& band, double q_min,
                       std::string source) {
  RateEstimate est;
  est.bpm = 60.0 * peak.frequency_hz;
  est.quality = peak.quality;
  est.valid = peak.quality >= q_min && band.contains_bpm(est.bpm);
  est.source = std::move(source);
  return est;
}

}  // namespace

RateEstimate estimate_hr_rppg(const RgbTrace& trace, const RppgParams& params) {
  const SampleSeries bvp = params.green_only ? green_bvp(trace) : chrom_bvp(trace);
  const SampleSeries filtered = bandpass(bvp, params.band);
  return from_peak(spectral_peak(filtered, params.band), params.band, params.q_min, "rppg");
}

RateEstimate estimate_rate_mmwave(const SampleSeries& displacement, const BandSpec& band,
                                  std::optional<double> q_min) {
  displacement.validate();
  if (displacement.duration() + 1e-9 < kMmwaveMinDuration) {
    throw VitalsError(VitalsErrc::SeriesTooShort, "mmwave needs at least 10 s");
  }
  const SampleSeries filtered = bandpass(displacement, band);
  return from_peak(dominant_frequency(filtered, band), band, q_min.value_or(default_quality_min(band)),
                   "mmwave");
}

RateEstimate estimate_rate_peaks(const SampleSeries& s, const PeakRateParams& params) {
  const SampleSeries filtered = bandpass(s, params.band);
  const SpectralPeak spec = spectral_peak(filtered, params.band);
  const auto peaks = find_peaks(filtered, params.min_spacing, params.min_prominence);
  if (peaks.size() < 2) {
    return RateEstimate::invalid(params.source, spec.quality);
  }
  RateEstimate est;
  est.bpm = rate_from_peaks(peaks, filtered.timestamps);
  est.quality = spec.quality;
  const bool in_band = clamp_to_band(est.bpm, params.band, filtered.duration());
  est.valid = spec.quality >= params.q_min && in_band;
  est.source = params.source;
  return est;
}

RateEstimate estimate_rr_pcr(const SampleSeries& distance) {
  PeakRateParams params;
  params.source = "pcr";
  return estimate_rate_peaks(distance, params);
}

RateEstimate sliding_median(const std::vector<RateEstimate>& estimates, std::size_t window) {
  if (window < 1) {
    throw VitalsError(VitalsErrc::ParamOutOfRange, "window must be at least 1");
  }
  std::vector<double> recent;
  double quality = 0.0;
  std::string source;
  for (auto it = estimates.rbegin(); it != estimates.rend() && recent.size() < window; ++it) {
    if (it->valid) {
      recent.push_back(it->bpm);
      quality += it->quality;
      if (source.empty()) {
        source = it->source;
      }
    }
  }
  if (recent.empty()) {
    return RateEstimate::invalid(estimates.empty() ? std::string{} : estimates.back().source);
  }
  std::sort(recent.begin(), recent.end());
  const std::size_t m = recent.size();
  const double med = m % 2 == 1 ? recent[m / 2] : 0.5 * (recent[m / 2 - 1] + recent[m / 2]);
  return RateEstimate{med, quality / static_cast<double>(m), true, source};
}

}  // namespace triage::vitals
