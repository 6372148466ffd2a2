#include "triage/vitals/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace triage::vitals {

namespace {

using Rng = boost::random::mt19937_64;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// amplitudes per modality, in the unit of the produced signal
constexpr double kMmwaveResp = 4e-3;
constexpr double kMmwaveCardiac = 4e-4;
constexpr double kPcrDistance = 0.8;
constexpr double kPcrResp = 5e-3;
constexpr double kPcrCardiac = 2e-4;
constexpr double kRgbPulse = 0.005;
constexpr double kRgbResp = 0.002;
constexpr double kRgbBase[3] = {0.6, 0.45, 0.35};
constexpr double kRgbPbv[3] = {0.33, 0.77, 0.53};
constexpr double kThermalCoupling = 0.1;
constexpr double kThermalAmbient = 30.0;
constexpr double kThermalCardiac = 0.02;

// independent streams so that enabling one effect does not shift the others
enum Stream : std::uint64_t { kPhase = 1, kNoise = 2, kMotion = 3, kEpisodes = 4, kPose = 5 };

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng stream(std::uint64_t seed, Stream s) { return Rng(splitmix(seed * 8 + s)); }

double uniform(Rng& rng, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

void check_params(const SynthParams& p) {
  if (!(p.hr_bpm >= 30.0 && p.hr_bpm <= 200.0)) {
    throw VitalsError(VitalsErrc::ParamOutOfRange, "hr_bpm outside [30, 200]: " + std::to_string(p.hr_bpm));
  }
  if (!(p.rr_bpm >= 4.0 && p.rr_bpm <= 40.0)) {
    throw VitalsError(VitalsErrc::ParamOutOfRange, "rr_bpm outside [4, 40]: " + std::to_string(p.rr_bpm));
  }
}

struct Grid {
  Eigen::VectorXd t;  // relative to t0
  double fs;
};

Grid make_grid(const SynthParams& p) {
  const auto d = modality_defaults(p.modality);
  const double fs = p.fs > 0.0 ? p.fs : d.fs;
  const double duration = p.duration > 0.0 ? p.duration : d.duration;
  const auto n = static_cast<Eigen::Index>(std::llround(duration * fs));
  if (n < 2) {
    throw VitalsError(VitalsErrc::ParamOutOfRange, "duration too short for the sample rate");
  }
  return {Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fs, fs};
}

Eigen::VectorXd cardiac(const Eigen::VectorXd& t, double hr_bpm, double phase) {
  const double w = kTwoPi * hr_bpm / 60.0;
  return ((w * t).array() + phase).sin() + kHarmonic * ((2.0 * w * t).array() + 2.0 * phase).sin();
}

Eigen::VectorXd respiratory(const Eigen::VectorXd& t, double rr_bpm, double phase) {
  const double w = kTwoPi * rr_bpm / 60.0;
  return ((w * t).array() + phase).sin();
}

double cardiac_rms() { return std::sqrt(0.5 * (1.0 + kHarmonic * kHarmonic)); }
double respiratory_rms() { return std::sqrt(0.5); }

double noise_sigma(double target_rms, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) {
    return 0.0;
  }
  return target_rms / std::pow(10.0, snr_db / 20.0);
}

Eigen::VectorXd motion_signal(const Eigen::VectorXd& t, const MotionArtifact& m, double target_rms,
                              std::uint64_t seed) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(t.size());
  if (!m.enabled || m.n_tones < 1) {
    return out;
  }
  Rng rng = stream(seed, kMotion);
  const double amp = m.rms_ratio * target_rms * std::sqrt(2.0 / m.n_tones);
  for (int k = 0; k < m.n_tones; ++k) {
    const double f = m.center_hz * uniform(rng, 1.0 - 0.5 * m.rel_bandwidth, 1.0 + 0.5 * m.rel_bandwidth);
    const double ph = uniform(rng, 0.0, kTwoPi);
    out.array() += amp * ((kTwoPi * f * t).array() + ph).sin();
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t[i] < m.start || t[i] >= m.end) {
      out[i] = 0.0;
    }
  }
  return out;
}

Eigen::VectorXd gaussian(Rng& rng, Eigen::Index n, double sigma) {
  Eigen::VectorXd out(n);
  if (sigma == 0.0) {
    out.setZero();
    return out;
  }
  boost::random::normal_distribution<double> dist(0.0, sigma);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = dist(rng);
  }
  return out;
}

}  // namespace

const char* to_string(Modality m) {
  switch (m) {
    case Modality::Mmwave: return "mmwave";
    case Modality::Rgb: return "rgb";
    case Modality::Pcr: return "pcr";
    case Modality::Thermal: return "thermal";
  }
  return "unknown";
}

Modality modality_from_string(std::string_view name) {
  if (name == "mmwave") return Modality::Mmwave;
  if (name == "rgb") return Modality::Rgb;
  if (name == "pcr") return Modality::Pcr;
  if (name == "thermal") return Modality::Thermal;
  throw VitalsError(VitalsErrc::ParamOutOfRange, "unknown modality '" + std::string(name) + "'");
}

ModalityDefaults modality_defaults(Modality m) {
  switch (m) {
    case Modality::Mmwave: return {20.0, 30.0};
    case Modality::Rgb: return {30.0, 10.0};
    case Modality::Pcr: return {20.0, 30.0};
    case Modality::Thermal: return {30.0, 30.0};
  }
  return {20.0, 30.0};
}

SynthComponents synth_components(const SynthParams& p) {
  check_params(p);
  Rng rng = stream(p.seed, kPhase);
  SynthComponents c;
  c.cardiac_phase = uniform(rng, 0.0, kTwoPi);
  c.respiratory_phase = uniform(rng, 0.0, kTwoPi);
  double target = 0.0;
  switch (p.modality) {
    case Modality::Mmwave:
      c.cardiac_amplitude = kMmwaveCardiac;
      c.respiratory_amplitude = kMmwaveResp;
      target = kMmwaveCardiac * cardiac_rms();
      break;
    case Modality::Rgb:
      // normalised green-channel units
      c.cardiac_amplitude = kRgbPulse * kRgbPbv[1];
      c.respiratory_amplitude = kRgbResp;
      target = c.cardiac_amplitude * cardiac_rms();
      break;
    case Modality::Pcr:
      c.cardiac_amplitude = kPcrCardiac;
      c.respiratory_amplitude = kPcrResp;
      target = kPcrResp * respiratory_rms();
      break;
    case Modality::Thermal:
      c.cardiac_amplitude = kThermalCardiac;
      c.respiratory_amplitude = kThermalCoupling * p.contrast_f;
      target = c.respiratory_amplitude * respiratory_rms();
      break;
  }
  c.noise_sigma = noise_sigma(target, p.snr_db);
  c.cardiac_amplitude *= p.cardiac_gain;
  return c;
}

SampleSeries synth_mmwave(const SynthParams& params) {
  SynthParams p = params;
  p.modality = Modality::Mmwave;
  const auto c = synth_components(p);
  const Grid g = make_grid(p);
  Rng noise = stream(p.seed, kNoise);
  Eigen::VectorXd x = c.respiratory_amplitude * respiratory(g.t, p.rr_bpm, c.respiratory_phase) +
                      c.cardiac_amplitude * cardiac(g.t, p.hr_bpm, c.cardiac_phase);
  x += motion_signal(g.t, p.motion, kMmwaveCardiac * cardiac_rms(), p.seed);
  x += gaussian(noise, g.t.size(), c.noise_sigma);
  return SampleSeries::uniform(std::move(x), g.fs, p.t0);
}

SampleSeries synth_pcr(const SynthParams& params) {
  SynthParams p = params;
  p.modality = Modality::Pcr;
  const auto c = synth_components(p);
  const Grid g = make_grid(p);
  Rng noise = stream(p.seed, kNoise);
  Eigen::VectorXd x = c.respiratory_amplitude * respiratory(g.t, p.rr_bpm, c.respiratory_phase) +
                      c.cardiac_amplitude * cardiac(g.t, p.hr_bpm, c.cardiac_phase);
  x += motion_signal(g.t, p.motion, kPcrResp * respiratory_rms(), p.seed);
  x += gaussian(noise, g.t.size(), c.noise_sigma);
  x.array() += kPcrDistance;
  return SampleSeries::uniform(std::move(x), g.fs, p.t0);
}

RgbTrace synth_rgb(const SynthParams& params) {
  SynthParams p = params;
  p.modality = Modality::Rgb;
  const auto c = synth_components(p);
  const Grid g = make_grid(p);
  Rng noise = stream(p.seed, kNoise);
  const Eigen::VectorXd pulse = cardiac(g.t, p.hr_bpm, c.cardiac_phase);
  const Eigen::VectorXd resp = respiratory(g.t, p.rr_bpm, c.respiratory_phase);
  const Eigen::VectorXd motion = motion_signal(g.t, p.motion, kRgbPulse * kRgbPbv[1] * cardiac_rms(), p.seed);
  const Eigen::VectorXd illum =
      (1.0 + p.illumination_drift * (kTwoPi * p.illumination_drift_hz * g.t).array().sin()).matrix();

  RgbTrace trace;
  trace.timestamps = g.t.array() + p.t0;
  trace.rgb.resize(g.t.size(), 3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd rel = (1.0 + kRgbPulse * kRgbPbv[k] * pulse.array() + kRgbResp * resp.array() +
                                 motion.array())
                                    .matrix();
    const Eigen::VectorXd n = gaussian(noise, g.t.size(), c.noise_sigma);
    trace.rgb.col(k) = (kRgbBase[k] * (rel.array() * illum.array() + n.array())).cwiseMax(0.0).cwiseMin(1.0);
  }
  return trace;
}

ThermalRoiTrace synth_thermal(const SynthParams& params) {
  SynthParams p = params;
  p.modality = Modality::Thermal;
  const auto c = synth_components(p);
  const Grid g = make_grid(p);
  const Eigen::Index n = g.t.size();
  Rng noise = stream(p.seed, kNoise);
  Rng pose = stream(p.seed, kPose);
  Rng episodes = stream(p.seed, kEpisodes);

  ThermalRoiTrace trace;
  trace.timestamps = g.t.array() + p.t0;
  trace.intensity = c.respiratory_amplitude * respiratory(g.t, p.rr_bpm, c.respiratory_phase) +
                    c.cardiac_amplitude * cardiac(g.t, p.hr_bpm, c.cardiac_phase);
  trace.intensity += motion_signal(g.t, p.motion, c.respiratory_amplitude * respiratory_rms(), p.seed);
  trace.intensity += gaussian(noise, n, c.noise_sigma);
  trace.intensity.array() += kThermalAmbient + p.thermal_drift_per_s * g.t.array();

  boost::random::normal_distribution<double> jitter(0.0, 0.5);
  boost::random::normal_distribution<double> conf_noise(0.0, 0.03);
  trace.displacement.resize(n);
  trace.confidence.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    trace.displacement[i] = std::min(std::abs(jitter(pose)), 2.5);
    trace.confidence[i] = std::clamp(0.9 + conf_noise(pose), 0.0, 1.0);
  }

  if (p.episodes.rate_per_min > 0.0) {
    const double mean_gap = 60.0 / p.episodes.rate_per_min;
    boost::random::normal_distribution<double> corrupt(0.0, p.episodes.corruption * c.respiratory_amplitude);
    double start = -mean_gap * std::log(1.0 - uniform(episodes, 0.0, 1.0));
    const double end_time = g.t[n - 1];
    while (start < end_time) {
      const double len = uniform(episodes, p.episodes.min_length, p.episodes.max_length);
      const double level = corrupt(episodes);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (g.t[i] >= start && g.t[i] < start + len) {
          trace.displacement[i] = uniform(episodes, 5.0, 15.0);
          trace.confidence[i] = uniform(episodes, 0.3, 0.9);
          trace.intensity[i] += level;
        }
      }
      start += len - mean_gap * std::log(1.0 - uniform(episodes, 0.0, 1.0));
    }
  }
  return trace;
}

SynthOutput synth_vital_signal(const SynthParams& params) {
  switch (params.modality) {
    case Modality::Mmwave: return synth_mmwave(params);
    case Modality::Rgb: return synth_rgb(params);
    case Modality::Pcr: return synth_pcr(params);
    case Modality::Thermal: return synth_thermal(params);
  }
  throw VitalsError(VitalsErrc::ParamOutOfRange, "unknown modality");
}

Eigen::VectorXd white_noise(Eigen::Index n, std::uint64_t seed) {
  Rng rng = stream(seed, kNoise);
  return gaussian(rng, n, 1.0);
}

}  // namespace triage::vitals
