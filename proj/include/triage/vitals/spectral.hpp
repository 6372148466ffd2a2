#pragma once

#include "triage/vitals/series.hpp"

namespace triage::vitals {

/// Quality gates, calibrated on noise-only Monte-Carlo runs so that at least
/// 95% of pure-noise windows fall below them. The respiratory band spans fewer
/// bins, which raises the peak share of pure noise.
inline constexpr double kQualityMin = 0.2;
inline constexpr double kRespiratoryQualityMin = 0.3;

struct SpectralPeak {
  double frequency_hz{0.0};
  double quality{0.0};
  /// Sinusoid amplitude implied by the refined peak and the window gain.
  double amplitude{0.0};
};

/// Largest in-band magnitude of the detrended, Hann-windowed spectrum,
/// refined by a parabola through the log magnitudes of the neighbouring bins.
/// quality = refined peak magnitude / sum of in-band magnitudes.
/// Requires duration >= 3 / f_lo.
SpectralPeak dominant_frequency(const SampleSeries& s, const BandSpec& band);

/// kRespiratoryQualityMin for bands that end at or below 0.5 Hz, else kQualityMin.
double default_quality_min(const BandSpec& band);

/// Same estimate without the minimum-duration requirement.
SpectralPeak spectral_peak(const SampleSeries& s, const BandSpec& band);

/// Rates within half a frequency bin (30 / duration bpm) outside the band are
/// pulled onto the nearest edge; returns false when farther out.
bool clamp_to_band(double& bpm, const BandSpec& band, double duration);

}  // namespace triage::vitals
