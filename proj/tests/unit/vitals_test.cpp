#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "triage/vitals/vitals.hpp"

using namespace triage::vitals;

namespace {

constexpr double kPi = std::numbers::pi;

SampleSeries tone(double f, double seconds, double fs, double amp = 1.0, double phase = 0.0) {
  const auto n = static_cast<Eigen::Index>(std::llround(seconds * fs));
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fs;
  return SampleSeries::uniform((amp * ((2 * kPi * f * t).array() + phase).sin()).matrix(), fs);
}

double rms(const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); }

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd x = a.array() - a.mean();
  const Eigen::ArrayXd y = b.array() - b.mean();
  return (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
}

SynthParams params(double hr, double rr, Modality m, double snr, std::uint64_t seed) {
  SynthParams p;
  p.hr_bpm = hr;
  p.rr_bpm = rr;
  p.modality = m;
  p.snr_db = snr;
  p.seed = seed;
  return p;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Series, ValidateRejectsBadInput) {
  SampleSeries s;
  s.timestamps = Eigen::Vector3d(0, 1, 1);
  s.values = Eigen::Vector3d(1, 2, 3);
  EXPECT_THROW(s.validate(), VitalsError);
  s.timestamps = Eigen::Vector3d(0, 1, 2);
  s.values[1] = std::nan("");
  EXPECT_THROW(s.validate(), VitalsError);
}

TEST(Series, ResampleIrregularToMedianRate) {
  // 20 Hz with every fifth sample missing
  std::vector<double> t, v;
  for (int i = 0; i < 400; ++i) {
    if (i % 5 == 3) continue;
    t.push_back(i / 20.0);
    v.push_back(std::sin(2 * kPi * 0.3 * i / 20.0));
  }
  SampleSeries s;
  s.timestamps = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  s.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  EXPECT_FALSE(is_uniform(s));
  const auto u = resample_uniform(s);
  EXPECT_NEAR(u.sample_rate_hint, 20.0, 1e-9);
  EXPECT_TRUE(is_uniform(u));
  EXPECT_EQ(u.size(), 400);
}

TEST(Bandpass, InBandPassthrough) {
  for (double phase : {0.0, 0.7, 2.1}) {
    const auto s = tone(1.2, 15, 20, 1.0, phase);
    const auto y = bandpass(s, {1.0, 3.0});
    ASSERT_EQ(y.size(), s.size());
    EXPECT_NEAR(rms(y.values) / rms(s.values), 1.0, 0.05);
    // zero phase: away from the edges the output lines up with the input
    const Eigen::Index q = s.size() / 4;
    EXPECT_GT(corr(y.values.segment(q, 2 * q), s.values.segment(q, 2 * q)), 0.999);
  }
}

TEST(Bandpass, OutOfBandRejection) {
  for (double phase : {0.0, 1.0, 2.5}) {
    const auto s = tone(0.2, 15, 20, 1.0, phase);
    EXPECT_LT(rms(bandpass(s, {1.0, 3.0}).values) / rms(s.values), 0.01);
  }
}

TEST(Bandpass, SeparatesRespiratoryFromCardiac) {
  const auto slow = tone(0.25, 60, 20, 1.0, 0.4);
  auto mix = slow;
  mix.values += tone(1.2, 60, 20, 1.0, 1.3).values;
  EXPECT_GT(corr(bandpass(mix, kRespiratoryBand).values, slow.values), 0.99);
}

TEST(Bandpass, StopbandAttenuationAtLeast40dB) {
  // steady state: the first and last 10 s carry the window-edge transient
  const Eigen::Index guard = 200;
  for (double f : {0.3, 0.5, 0.8, 4.5, 6.0, 9.0}) {
    for (double phase : {0.0, 1.1, 2.3}) {
      const auto s = tone(f, 60, 20, 1.0, phase);
      const auto y = bandpass(s, {1.0, 3.0});
      const Eigen::Index m = s.size() - 2 * guard;
      EXPECT_LT(rms(y.values.segment(guard, m)) / rms(s.values.segment(guard, m)), 0.01) << f;
    }
  }
}

TEST(Bandpass, Linearity) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Eigen::VectorXd a(400), b(400);
  for (Eigen::Index i = 0; i < 400; ++i) {
    a[i] = nd(rng);
    b[i] = nd(rng);
  }
  const double ka = 2.5, kb = -0.75;
  const auto sa = SampleSeries::uniform(a, 20);
  const auto sb = SampleSeries::uniform(b, 20);
  const auto sab = SampleSeries::uniform(ka * a + kb * b, 20);
  const Eigen::VectorXd lhs = bandpass(sab, {0.75, 3.0}).values;
  const Eigen::VectorXd rhs = ka * bandpass(sa, {0.75, 3.0}).values + kb * bandpass(sb, {0.75, 3.0}).values;
  EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-9);
}

TEST(Bandpass, BandInvalid) {
  const auto s = tone(1.0, 10, 20);
  EXPECT_THROW(bandpass(s, {1.0, 10.0}), VitalsError);
  EXPECT_THROW(bandpass(s, {2.0, 1.0}), VitalsError);
  try {
    bandpass(s, {1.0, 12.0});
  } catch (const VitalsError& e) {
    EXPECT_EQ(e.code(), VitalsErrc::BandInvalid);
  }
}

TEST(Bandpass, MaskShape) {
  const BandSpec b{1.0, 3.0};
  EXPECT_DOUBLE_EQ(band_mask(1.0, b), 1.0);
  EXPECT_DOUBLE_EQ(band_mask(3.0, b), 1.0);
  EXPECT_NEAR(band_mask(0.95, b), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(band_mask(0.9, b), 0.0);
  EXPECT_DOUBLE_EQ(band_mask(3.1, b), 0.0);
}

TEST(DominantFrequency, SingleTones) {
  EXPECT_NEAR(dominant_frequency(tone(1.2, 15, 20), {1.0, 3.0}).frequency_hz, 1.2, 0.02);
  EXPECT_NEAR(dominant_frequency(tone(0.25, 30, 20), kRespiratoryBand).frequency_hz, 0.25, 0.01);
}

TEST(DominantFrequency, TooShort) {
  EXPECT_THROW(dominant_frequency(tone(0.25, 20, 20), kRespiratoryBand), VitalsError);
  EXPECT_NO_THROW(dominant_frequency(tone(0.25, 30, 20), kRespiratoryBand));
}

TEST(DominantFrequency, NoisyToneMonteCarlo) {
  // 10 dB SNR for a unit sinusoid: noise variance 0.05
  double tone_q = 0.0, noise_q = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::VectorXd noise = white_noise(300, seed) * std::sqrt(0.05);
    auto s = tone(1.1, 15, 20, 1.0, 0.1 * static_cast<double>(seed));
    s.values += noise;
    const auto pk = dominant_frequency(s, {1.0, 3.0});
    EXPECT_NEAR(pk.frequency_hz, 1.1, 0.05);
    tone_q += pk.quality;
    noise_q += dominant_frequency(SampleSeries::uniform(noise, 20), {1.0, 3.0}).quality;
  }
  EXPECT_GT(tone_q, 2.0 * noise_q);
}

TEST(DominantFrequency, QualityMonotoneInSnr) {
  double prev = 2.0;
  for (double snr : {40.0, 20.0, 10.0, 5.0, 0.0, -5.0}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      auto p = params(84, 15, Modality::Mmwave, snr, seed);
      mean += estimate_rate_mmwave(synth_mmwave(p), kCardiacBand).quality;
    }
    mean /= 40;
    EXPECT_LE(mean, prev) << snr;
    prev = mean;
  }
}

TEST(FindPeaks, SinusoidSpacing) {
  const auto s = tone(0.25, 20, 20);
  const auto pk = find_peaks(s, 1.0, 0.1);
  ASSERT_EQ(pk.size(), 5u);
  for (std::size_t i = 1; i < pk.size(); ++i) {
    EXPECT_NEAR(s.timestamps[pk[i]] - s.timestamps[pk[i - 1]], 4.0, 1e-9);
  }
}

TEST(FindPeaks, ConstantHasNone) {
  EXPECT_TRUE(find_peaks(SampleSeries::uniform(Eigen::VectorXd::Constant(100, 3.0), 10), 1.0, 0.1).empty());
}

TEST(FindPeaks, MergedBumpsKeepLarger) {
  const double fs = 50;
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(250, 0, 249) / fs;
  const auto bump = [&](double c, double a) { return (a * (-(t.array() - c).square() / (2 * 0.05 * 0.05)).exp()).matrix(); };
  const auto s = SampleSeries::uniform(bump(2.0, 0.8) + bump(2.5, 1.0), fs);
  const auto pk = find_peaks(s, 1.0, 0.1);
  ASSERT_EQ(pk.size(), 1u);
  EXPECT_NEAR(s.timestamps[pk[0]], 2.5, 1e-9);
  EXPECT_EQ(find_peaks(s, 0.4, 0.1).size(), 2u);
}

TEST(FindPeaks, PlateauResolvesToMiddle) {
  Eigen::VectorXd v(7);
  v << 0, 1, 2, 2, 2, 1, 0;
  const auto pk = find_peaks(SampleSeries::uniform(v, 1), 1.0, 0.1);
  ASSERT_EQ(pk.size(), 1u);
  EXPECT_EQ(pk[0], 3);
}

TEST(FindPeaks, SpacingPropertyOnRandomSignals) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> spacing(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = white_noise(500, static_cast<std::uint64_t>(trial));
    const auto s = SampleSeries::uniform(x, 25);
    const double d = spacing(rng);
    const auto pk = find_peaks(s, d, 0.05);
    const auto prom = peak_prominences(x, pk);
    for (std::size_t i = 0; i < pk.size(); ++i) {
      if (i > 0) {
        EXPECT_GE(s.timestamps[pk[i]] - s.timestamps[pk[i - 1]], d);
        EXPECT_GT(pk[i], pk[i - 1]);
      }
      EXPECT_GE(prom[i], 0.05 * (x.maxCoeff() - x.minCoeff()));
      EXPECT_GT(x[pk[i]], x[pk[i] - 1]);
    }
  }
}

TEST(RateFromPeaks, Examples) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(1001, 0, 10);  // 100 Hz
  EXPECT_NEAR(rate_from_peaks({0, 80, 160, 240}, t), 75.0, 1e-9);
  Eigen::VectorXd slow = Eigen::VectorXd::LinSpaced(201, 0, 20);
  EXPECT_NEAR(rate_from_peaks({0, 40, 80, 120}, slow), 15.0, 1e-9);
  EXPECT_NEAR(rate_from_peaks({0, 90, 190, 300}, t), 60.0, 1e-9);
  EXPECT_THROW(rate_from_peaks({5}, t), VitalsError);
}

TEST(Chrom, ConstantColourIsDegenerate) {
  RgbTrace tr;
  tr.timestamps = Eigen::VectorXd::LinSpaced(300, 0, 299) / 30.0;
  tr.rgb = Eigen::MatrixX3d::Constant(300, 3, 0.5);
  EXPECT_THROW(chrom_bvp(tr), VitalsError);
}

TEST(Chrom, TooFewFrames) {
  auto tr = synth_rgb(params(70, 15, Modality::Rgb, kInf, 1));
  tr.timestamps.conservativeResize(40);
  tr.rgb.conservativeResize(40, 3);
  EXPECT_THROW(chrom_bvp(tr), VitalsError);
}

TEST(Chrom, RecoversEmbeddedPulse) {
  const auto tr = synth_rgb(params(66, 15, Modality::Rgb, kInf, 3));
  const auto bvp = chrom_bvp(tr);
  EXPECT_NEAR(bvp.values.mean(), 0.0, 1e-12);
  EXPECT_NEAR(spectral_peak(bandpass(bvp, kRppgBand), {1.0, 3.0}).frequency_hz, 1.1, 0.05);
}

TEST(Chrom, RejectsIlluminationDrift) {
  auto p = params(66, 15, Modality::Rgb, 20, 5);
  p.illumination_drift = 0.05;
  const auto tr = synth_rgb(p);
  EXPECT_NEAR(spectral_peak(bandpass(chrom_bvp(tr), kRppgBand), {1.0, 3.0}).frequency_hz, 1.1, 0.05);
  const auto est = estimate_hr_rppg(tr);
  EXPECT_TRUE(est.valid);
  EXPECT_NEAR(est.bpm, 66, 2);
}

TEST(Rppg, SyntheticTrace) {
  const auto est = estimate_hr_rppg(synth_rgb(params(66, 15, Modality::Rgb, 20, 2)));
  EXPECT_TRUE(est.valid);
  EXPECT_NEAR(est.bpm, 66, 2);
  EXPECT_EQ(est.source, "rppg");
}

TEST(Rppg, ThreeHundredFramesAccepted) {
  const auto tr = synth_rgb(params(80, 15, Modality::Rgb, 20, 9));
  EXPECT_EQ(tr.size(), 300);
  EXPECT_NO_THROW(estimate_hr_rppg(tr));
}

TEST(Rppg, NoiseTraceInvalid) {
  RgbTrace tr;
  tr.timestamps = Eigen::VectorXd::LinSpaced(300, 0, 299) / 30.0;
  tr.rgb.resize(300, 3);
  for (int c = 0; c < 3; ++c) {
    tr.rgb.col(c) = (0.5 + 0.002 * white_noise(300, 10 + static_cast<std::uint64_t>(c)).array()).matrix();
  }
  EXPECT_FALSE(estimate_hr_rppg(tr).valid);
}

TEST(Rppg, GreenOnlyOption) {
  RppgParams rp;
  rp.green_only = true;
  const auto est = estimate_hr_rppg(synth_rgb(params(90, 15, Modality::Rgb, 20, 2)), rp);
  EXPECT_NEAR(est.bpm, 90, 2);
}

TEST(Mmwave, CardiacAndRespiratoryBands) {
  const auto s = synth_mmwave(params(75, 15, Modality::Mmwave, kInf, 1));
  const auto hr = estimate_rate_mmwave(s, kCardiacBand);
  const auto rr = estimate_rate_mmwave(s, kRespiratoryBand);
  EXPECT_TRUE(hr.valid);
  EXPECT_NEAR(hr.bpm, 75, 2);
  EXPECT_TRUE(rr.valid);
  EXPECT_NEAR(rr.bpm, 15, 1);
}

TEST(Mmwave, MotionArtifactFailsGate) {
  auto p = params(75, 15, Modality::Mmwave, 20, 1);
  p.motion.enabled = true;
  p.motion.center_hz = 0.7;
  EXPECT_FALSE(estimate_rate_mmwave(synth_mmwave(p), kCardiacBand).valid);
}

TEST(Mmwave, NeedsTenSeconds) {
  auto p = params(75, 15, Modality::Mmwave, kInf, 1);
  p.duration = 8;
  EXPECT_THROW(estimate_rate_mmwave(synth_mmwave(p), kCardiacBand), VitalsError);
}

TEST(SlidingMedian, Examples) {
  EXPECT_DOUBLE_EQ(sliding_median({{72, 1, true, "m"}, {74, 1, true, "m"}, {120, 1, true, "m"}}, 3).bpm, 74);
  EXPECT_FALSE(sliding_median({RateEstimate::invalid("m"), RateEstimate::invalid("m")}, 3).valid);
  const auto one = sliding_median({{15, 1, true, "m"}}, 5);
  EXPECT_TRUE(one.valid);
  EXPECT_DOUBLE_EQ(one.bpm, 15);
  // only the most recent valid estimates count
  EXPECT_DOUBLE_EQ(sliding_median({{200, 1, true, "m"}, {70, 1, true, "m"}, RateEstimate::invalid("m"), {72, 1, true, "m"}}, 2).bpm, 71);
}

TEST(Pcr, RecoversRates) {
  for (double rr : {12.0, 20.0}) {
    const auto est = estimate_rr_pcr(synth_pcr(params(70, rr, Modality::Pcr, kInf, 4)));
    EXPECT_TRUE(est.valid);
    EXPECT_NEAR(est.bpm, rr, 1) << rr;
    EXPECT_EQ(est.source, "pcr");
  }
}

TEST(Pcr, FlatDistanceInvalid) {
  EXPECT_FALSE(estimate_rr_pcr(SampleSeries::uniform(Eigen::VectorXd::Constant(600, 0.8), 20)).valid);
}

TEST(Thermal, DriftRemovedAndStable) {
  auto p = params(70, 15, Modality::Thermal, 20, 6);
  p.thermal_drift_per_s = 0.1;
  const auto est = estimate_rr_thermal(synth_thermal(p));
  EXPECT_TRUE(est.averaged.valid);
  EXPECT_NEAR(est.averaged.bpm, 15, 1);
  EXPECT_NEAR(est.instantaneous_bpm, 15, 2);
  EXPECT_TRUE(est.stable);
  EXPECT_EQ(est.averaged.source, "lwir");
}

TEST(Thermal, MostlyMovingFramesThrow) {
  auto tr = synth_thermal(params(70, 15, Modality::Thermal, 20, 6));
  for (Eigen::Index i = 0; i < tr.size(); ++i) {
    if (i % 5 < 3) tr.displacement[i] = 6.0;
  }
  try {
    estimate_rr_thermal(tr);
    FAIL() << "expected InsufficientStableFrames";
  } catch (const VitalsError& e) {
    EXPECT_EQ(e.code(), VitalsErrc::InsufficientStableFrames);
  }
}

TEST(Thermal, StabilityFlagFollowsGatedFraction) {
  auto tr = synth_thermal(params(70, 15, Modality::Thermal, 20, 6));
  for (Eigen::Index i = 0; i < tr.size(); ++i) {
    if (i % 4 == 0) tr.confidence[i] = 0.2;
  }
  const auto est = estimate_rr_thermal(tr);
  EXPECT_NEAR(est.gated_fraction, 0.25, 1e-9);
  EXPECT_FALSE(est.stable);
}

TEST(Thermal, ContrastFloor) {
  auto p = params(70, 15, Modality::Thermal, 20, 6);
  p.contrast_f = 10;
  EXPECT_TRUE(estimate_rr_thermal(synth_thermal(p)).averaged.valid);
  p.contrast_f = 3;
  const auto low = estimate_rr_thermal(synth_thermal(p));
  EXPECT_FALSE(low.averaged.valid);
  EXPECT_NEAR(low.amplitude, 0.3, 0.05);
}

TEST(Synth, ClosedFormComposition) {
  auto p = params(75, 15, Modality::Mmwave, kInf, 1);
  p.duration = 40;
  const auto s = synth_mmwave(p);
  const auto c = synth_components(p);
  for (Eigen::Index i = 0; i < s.size(); i += 37) {
    const double t = s.timestamps[i];
    const double wc = 2 * kPi * 1.25, wr = 2 * kPi * 0.25;
    const double expect = c.respiratory_amplitude * std::sin(wr * t + c.respiratory_phase) +
                          c.cardiac_amplitude * (std::sin(wc * t + c.cardiac_phase) +
                                                 kHarmonic * std::sin(2 * wc * t + 2 * c.cardiac_phase));
    EXPECT_NEAR(s.values[i], expect, 1e-15);
  }
  // 40 s puts both rates on exact bins
  EXPECT_NEAR(spectral_peak(s, {1.0, 2.0}).frequency_hz, 1.25, 1e-6);
  EXPECT_NEAR(spectral_peak(s, kRespiratoryBand).frequency_hz, 0.25, 1e-6);
}

TEST(Synth, Deterministic) {
  for (int m = 0; m < 4; ++m) {
    auto p = params(90, 14, static_cast<Modality>(m), 10, 42);
    p.episodes.rate_per_min = 3;
    std::ostringstream a, b;
    write_trace(a, {p.modality, synth_vital_signal(p)});
    write_trace(b, {p.modality, synth_vital_signal(p)});
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Synth, ParamRange) {
  EXPECT_THROW(synth_mmwave(params(20, 15, Modality::Mmwave, kInf, 1)), VitalsError);
  EXPECT_THROW(synth_mmwave(params(70, 45, Modality::Mmwave, kInf, 1)), VitalsError);
  EXPECT_NO_THROW(synth_mmwave(params(30, 4, Modality::Mmwave, kInf, 1)));
  EXPECT_NO_THROW(synth_mmwave(params(200, 40, Modality::Mmwave, kInf, 1)));
}

TEST(Synth, RgbClosesLoop) {
  const auto est = estimate_hr_rppg(synth_rgb(params(65, 12, Modality::Rgb, 20, 7)));
  EXPECT_NEAR(est.bpm, 65, 2);
}

TEST(Synth, TimeShiftInvariance) {
  for (int m = 0; m < 4; ++m) {
    auto p = params(96, 18, static_cast<Modality>(m), 20, 3);
    const auto a = synth_vital_signal(p);
    p.t0 = 1234.5;
    const auto b = synth_vital_signal(p);
    double ra = 0, rb = 0;
    switch (p.modality) {
      case Modality::Mmwave:
        ra = estimate_rate_mmwave(std::get<SampleSeries>(a), kCardiacBand).bpm;
        rb = estimate_rate_mmwave(std::get<SampleSeries>(b), kCardiacBand).bpm;
        break;
      case Modality::Rgb:
        ra = estimate_hr_rppg(std::get<RgbTrace>(a)).bpm;
        rb = estimate_hr_rppg(std::get<RgbTrace>(b)).bpm;
        break;
      case Modality::Pcr:
        ra = estimate_rr_pcr(std::get<SampleSeries>(a)).bpm;
        rb = estimate_rr_pcr(std::get<SampleSeries>(b)).bpm;
        break;
      case Modality::Thermal:
        ra = estimate_rr_thermal(std::get<ThermalRoiTrace>(a)).averaged.bpm;
        rb = estimate_rr_thermal(std::get<ThermalRoiTrace>(b)).averaged.bpm;
        break;
    }
    EXPECT_NEAR(ra, rb, 0.05) << to_string(p.modality);
  }
}

TEST(TraceIo, ByteExactRoundTrip) {
  for (int m = 0; m < 4; ++m) {
    auto p = params(77, 13, static_cast<Modality>(m), 15, 8);
    const Trace tr{p.modality, synth_vital_signal(p)};
    std::ostringstream a;
    write_trace(a, tr);
    std::istringstream in(a.str());
    const Trace back = read_trace(in);
    EXPECT_EQ(back.modality, tr.modality);
    std::ostringstream b;
    write_trace(b, back);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(TraceIo, ParseErrors) {
  for (const char* text : {"", "mmwave\n0,1\n", "modality=sonar\n0,1\n", "modality=mmwave\n0,1,2\n",
                           "modality=mmwave\n0,x\n", "modality=mmwave\n0,1\n0,2\n", "modality=rgb\n0,0.5,0.5\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_trace(in), TraceParseError) << text;
  }
}
