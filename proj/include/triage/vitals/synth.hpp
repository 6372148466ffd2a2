#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include "triage/vitals/series.hpp"

namespace triage::vitals {

enum class Modality { Mmwave, Rgb, Pcr, Thermal };

const char* to_string(Modality m);
Modality modality_from_string(std::string_view name);

/// Band-limited motion: `n_tones` sinusoids with frequencies drawn uniformly
/// in center_hz * (1 +- rel_bandwidth / 2), random phases, total RMS
/// `rms_ratio` times the RMS of the target component. Active on
/// [start, end) seconds.
struct MotionArtifact {
  bool enabled{false};
  double center_hz{0.7};
  double rel_bandwidth{1.4};
  int n_tones{24};
  double rms_ratio{4.0};
  double start{0.0};
  double end{std::numeric_limits<double>::infinity()};
};

/// Thermal-only keypoint motion episodes. During an episode the displacement
/// exceeds the gate and the ROI intensity is corrupted.
struct MotionEpisodes {
  double rate_per_min{0.0};
  double min_length{0.5};
  double max_length{2.0};
  double corruption{2.0};
};

struct SynthParams {
  double hr_bpm{75.0};
  double rr_bpm{15.0};
  Modality modality{Modality::Mmwave};
  double snr_db{std::numeric_limits<double>::infinity()};
  MotionArtifact motion{};
  std::uint64_t seed{1};
  /// Zero selects the modality default.
  double duration{0.0};
  double fs{0.0};
  double t0{0.0};
  /// Scales the cardiac component; 0 gives a pulseless subject.
  double cardiac_gain{1.0};

  // modality-specific knobs
  double illumination_drift{0.0};
  double illumination_drift_hz{0.05};
  double contrast_f{10.0};
  double thermal_drift_per_s{0.0};
  MotionEpisodes episodes{};
};

/// Closed-form pieces of a synthetic trace, for reconstruction in tests.
/// cardiac(t) = sin(w_c t + phi_c) + kHarmonic * sin(2 w_c t + 2 phi_c),
/// respiratory(t) = sin(w_r t + phi_r), w = 2 pi bpm / 60, t measured from t0.
struct SynthComponents {
  double cardiac_phase{0.0};
  double respiratory_phase{0.0};
  double cardiac_amplitude{0.0};
  double respiratory_amplitude{0.0};
  double noise_sigma{0.0};
};

inline constexpr double kHarmonic = 0.25;

struct ModalityDefaults {
  double fs;
  double duration;
};
ModalityDefaults modality_defaults(Modality m);

using SynthOutput = std::variant<SampleSeries, RgbTrace, ThermalRoiTrace>;

/// Deterministic for a fixed seed. Throws ParamOutOfRange unless
/// 30 <= hr <= 200 and 4 <= rr <= 40.
SynthOutput synth_vital_signal(const SynthParams& params);

SampleSeries synth_mmwave(const SynthParams& params);
RgbTrace synth_rgb(const SynthParams& params);
SampleSeries synth_pcr(const SynthParams& params);
ThermalRoiTrace synth_thermal(const SynthParams& params);

/// Phases and amplitudes drawn for `params`, identical to what the
/// generators use.
SynthComponents synth_components(const SynthParams& params);

/// Unit-variance white noise series (for noise-only baselines).
Eigen::VectorXd white_noise(Eigen::Index n, std::uint64_t seed);

}  // namespace triage::vitals
