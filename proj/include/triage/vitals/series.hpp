#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace triage::vitals {

enum class VitalsErrc {
  InvalidSeries,
  BandInvalid,
  SeriesTooShort,
  TooFewPeaks,
  DegenerateTrace,
  InsufficientStableFrames,
  ParamOutOfRange,
};

const char* to_string(VitalsErrc code);

class VitalsError : public std::runtime_error {
 public:
  VitalsError(VitalsErrc code, const std::string& what);
  VitalsErrc code() const noexcept { return code_; }

 private:
  VitalsErrc code_;
};

/// Timestamped scalar signal. Timestamps are seconds and strictly increasing.
struct SampleSeries {
  Eigen::VectorXd timestamps;
  Eigen::VectorXd values;
  double sample_rate_hint{0.0};

  Eigen::Index size() const { return values.size(); }
  double duration() const;

  /// Samples at t0 + i / fs.
  static SampleSeries uniform(Eigen::VectorXd values, double fs, double t0 = 0.0);

  /// Throws InvalidSeries unless the type invariants hold.
  void validate() const;
};

/// Frequency band in Hz.
struct BandSpec {
  double f_lo{0.0};
  double f_hi{0.0};

  double lo_bpm() const { return 60.0 * f_lo; }
  double hi_bpm() const { return 60.0 * f_hi; }
  bool contains_bpm(double bpm) const { return bpm >= lo_bpm() && bpm <= hi_bpm(); }
};

inline constexpr BandSpec kRppgBand{0.75, 3.0};
inline constexpr BandSpec kCardiacBand{0.75, 3.0};
inline constexpr BandSpec kRespiratoryBand{0.1, 0.5};

struct RateEstimate {
  double bpm{0.0};
  double quality{0.0};
  bool valid{false};
  std::string source;

  static RateEstimate invalid(std::string source, double quality = 0.0) {
    return RateEstimate{0.0, quality, false, std::move(source)};
  }
};

/// Per-frame skin-mask mean colour, channels in [0, 1].
struct RgbTrace {
  Eigen::VectorXd timestamps;
  Eigen::MatrixX3d rgb;

  Eigen::Index size() const { return rgb.rows(); }
  void validate() const;
};

/// Nostril ROI intensity with the per-frame keypoint displacement (pixels)
/// and pose confidence used for gating.
struct ThermalRoiTrace {
  Eigen::VectorXd timestamps;
  Eigen::VectorXd intensity;
  Eigen::VectorXd displacement;
  Eigen::VectorXd confidence;

  Eigen::Index size() const { return intensity.size(); }
  void validate() const;
};

bool is_uniform(const SampleSeries& s, double rel_tol = 1e-6);

/// Median sample interval converted to Hz.
double median_rate(const Eigen::VectorXd& timestamps);

/// Linear resampling onto a uniform grid at the median rate, starting at the
/// first timestamp. Uniform input is returned unchanged.
SampleSeries resample_uniform(const SampleSeries& s);

/// Linear interpolation of (t, v) at the query times; clamps outside the range.
Eigen::VectorXd interp_linear(const Eigen::VectorXd& t, const Eigen::VectorXd& v,
                              const Eigen::VectorXd& query);

}  // namespace triage::vitals
