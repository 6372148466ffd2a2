#include "triage/vitals/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "triage/vitals/filter.hpp"

namespace triage::vitals {

SpectralPeak spectral_peak(const SampleSeries& s, const BandSpec& band) {
  const SampleSeries u = resample_uniform(s);
  const double fs = u.sample_rate_hint;
  check_band(band, fs);
  const Eigen::Index n = u.size();

  const Eigen::VectorXd x = remove_polynomial(u.values, 1);
  std::vector<double> w(static_cast<std::size_t>(n));
  double window_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                             static_cast<double>(n - 1));
    w[static_cast<std::size_t>(i)] = x[i] * hann;
    window_sum += hann;
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, w);
  const auto bins = static_cast<Eigen::Index>(spec.size());
  std::vector<double> mag(static_cast<std::size_t>(bins));
  for (Eigen::Index k = 0; k < bins; ++k) {
    mag[static_cast<std::size_t>(k)] = std::abs(spec[static_cast<std::size_t>(k)]);
  }

  const double df = fs / static_cast<double>(n);
  double total = 0.0;
  Eigen::Index best = -1;
  for (Eigen::Index k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f < band.f_lo || f > band.f_hi) {
      continue;
    }
    total += mag[static_cast<std::size_t>(k)];
    if (best < 0 || mag[static_cast<std::size_t>(k)] > mag[static_cast<std::size_t>(best)]) {
      best = k;
    }
  }
  if (best < 0) {
    throw VitalsError(VitalsErrc::SeriesTooShort, "no spectral bin inside the band");
  }
  if (total <= 0.0) {
    return {std::clamp(static_cast<double>(best) * df, band.f_lo, band.f_hi), 0.0, 0.0};
  }

  double peak = mag[static_cast<std::size_t>(best)];
  double offset = 0.0;
  if (best > 0 && best + 1 < bins) {
    const double ma = mag[static_cast<std::size_t>(best - 1)];
    const double mc = mag[static_cast<std::size_t>(best + 1)];
    if (ma > 0.0 && mc > 0.0 && peak > 0.0) {
      const double a = std::log(ma);
      const double b = std::log(peak);
      const double c = std::log(mc);
      const double denom = a - 2.0 * b + c;
      if (denom < 0.0) {
        offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
        peak = std::exp(b - 0.25 * (a - c) * offset);
      }
    }
  }
  const double f = std::clamp((static_cast<double>(best) + offset) * df, band.f_lo, band.f_hi);
  return {f, std::clamp(peak / total, 0.0, 1.0), 2.0 * peak / window_sum};
}

double default_quality_min(const BandSpec& band) {
  return band.f_hi <= kRespiratoryBand.f_hi ? kRespiratoryQualityMin : kQualityMin;
}

bool clamp_to_band(double& bpm, const BandSpec& band, double duration) {
  const double tol = duration > 0.0 ? 30.0 / duration : 0.0;
  if (bpm < band.lo_bpm() - tol || bpm > band.hi_bpm() + tol) {
    return false;
  }
  bpm = std::clamp(bpm, band.lo_bpm(), band.hi_bpm());
  return true;
}

SpectralPeak dominant_frequency(const SampleSeries& s, const BandSpec& band) {
  if (!(band.f_lo > 0.0)) {
    throw VitalsError(VitalsErrc::BandInvalid, "band needs f_lo > 0");
  }
  // small slack absorbs rounding in the sample count
  if (s.duration() + 1e-9 < 3.0 / band.f_lo) {
    throw VitalsError(VitalsErrc::SeriesTooShort, "duration below 3 / f_lo");
  }
  return spectral_peak(s, band);
}

}  // namespace triage::vitals
