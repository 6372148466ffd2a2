#pragma once

#include <optional>
#include <string>
#include <vector>

#include "triage/vitals/series.hpp"
#include "triage/vitals/spectral.hpp"

namespace triage::vitals {

struct RppgParams {
  BandSpec band{kRppgBand};
  double q_min{kQualityMin};
  bool green_only{false};
};

/// CHROM (or green channel) -> band-pass -> spectral peak.
RateEstimate estimate_hr_rppg(const RgbTrace& trace, const RppgParams& params = {});

inline constexpr double kMmwaveMinDuration = 10.0;

/// Band-pass -> spectral peak on a chest displacement series. One call
/// serves the cardiac and the respiratory band.
/// The quality gate defaults to default_quality_min(band).
RateEstimate estimate_rate_mmwave(const SampleSeries& displacement, const BandSpec& band,
                                  std::optional<double> q_min = std::nullopt);

struct PeakRateParams {
  BandSpec band{kRespiratoryBand};
  double min_spacing{1.6};
  double min_prominence{0.3};
  double q_min{kRespiratoryQualityMin};
  std::string source{"peaks"};
};

/// Band-pass -> find_peaks -> rate_from_peaks. Valid only with two or more
/// peaks, spectral quality at least q_min and a rate inside the band.
RateEstimate estimate_rate_peaks(const SampleSeries& s, const PeakRateParams& params);

/// Pulsed coherent radar range series (metres) to breaths per minute.
RateEstimate estimate_rr_pcr(const SampleSeries& distance);

/// Median of the most recent `window` valid estimates; averages the middle
/// pair for even counts.
RateEstimate sliding_median(const std::vector<RateEstimate>& estimates, std::size_t window);

}  // namespace triage::vitals
