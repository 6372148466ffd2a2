#include "triage/vitals/series.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace triage::vitals {

const char* to_string(VitalsErrc code) {
  switch (code) {
    case VitalsErrc::InvalidSeries: return "InvalidSeries";
    case VitalsErrc::BandInvalid: return "BandInvalid";
    case VitalsErrc::SeriesTooShort: return "SeriesTooShort";
    case VitalsErrc::TooFewPeaks: return "TooFewPeaks";
    case VitalsErrc::DegenerateTrace: return "DegenerateTrace";
    case VitalsErrc::InsufficientStableFrames: return "InsufficientStableFrames";
    case VitalsErrc::ParamOutOfRange: return "ParamOutOfRange";
  }
  return "Unknown";
}

VitalsError::VitalsError(VitalsErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {

void check_timestamps(const Eigen::VectorXd& t, Eigen::Index n) {
  if (t.size() != n) {
    throw VitalsError(VitalsErrc::InvalidSeries, "timestamp count does not match sample count");
  }
  if (n < 2) {
    throw VitalsError(VitalsErrc::InvalidSeries, "need at least two samples");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(t[i])) {
      throw VitalsError(VitalsErrc::InvalidSeries, "non-finite timestamp");
    }
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw VitalsError(VitalsErrc::InvalidSeries, "timestamps not strictly increasing");
    }
  }
}

void check_finite(const auto& m, const char* what) {
  if (!m.allFinite()) {
    throw VitalsError(VitalsErrc::InvalidSeries, std::string("non-finite ") + what);
  }
}

}  // namespace

double SampleSeries::duration() const {
  if (timestamps.size() < 2) {
    return 0.0;
  }
  // one sample period past the last sample, so n samples at fs span n / fs
  const double span = timestamps[timestamps.size() - 1] - timestamps[0];
  return span * static_cast<double>(timestamps.size()) / static_cast<double>(timestamps.size() - 1);
}

SampleSeries SampleSeries::uniform(Eigen::VectorXd values, double fs, double t0) {
  SampleSeries s;
  const Eigen::Index n = values.size();
  s.timestamps = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fs;
  s.timestamps.array() += t0;
  s.values = std::move(values);
  s.sample_rate_hint = fs;
  return s;
}

void SampleSeries::validate() const {
  check_timestamps(timestamps, values.size());
  check_finite(values, "sample value");
}

void RgbTrace::validate() const {
  check_timestamps(timestamps, rgb.rows());
  check_finite(rgb, "colour value");
  if ((rgb.array() < 0.0).any() || (rgb.array() > 1.0).any()) {
    throw VitalsError(VitalsErrc::InvalidSeries, "colour channels must lie in [0, 1]");
  }
}

void ThermalRoiTrace::validate() const {
  const Eigen::Index n = intensity.size();
  if (displacement.size() != n || confidence.size() != n) {
    throw VitalsError(VitalsErrc::InvalidSeries, "thermal streams differ in length");
  }
  check_timestamps(timestamps, n);
  check_finite(intensity, "intensity");
  check_finite(displacement, "displacement");
  check_finite(confidence, "confidence");
}

double median_rate(const Eigen::VectorXd& timestamps) {
  std::vector<double> dt(static_cast<std::size_t>(timestamps.size() - 1));
  for (std::size_t i = 0; i < dt.size(); ++i) {
    dt[i] = timestamps[static_cast<Eigen::Index>(i) + 1] - timestamps[static_cast<Eigen::Index>(i)];
  }
  const auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  double med = *mid;
  if (dt.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(dt.begin(), mid));
  }
  return 1.0 / med;
}

bool is_uniform(const SampleSeries& s, double rel_tol) {
  const Eigen::Index n = s.timestamps.size();
  if (n < 3) {
    return true;
  }
  const double step = (s.timestamps[n - 1] - s.timestamps[0]) / static_cast<double>(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(s.timestamps[i] - s.timestamps[i - 1] - step) > rel_tol * step) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd interp_linear(const Eigen::VectorXd& t, const Eigen::VectorXd& v,
                              const Eigen::VectorXd& query) {
  Eigen::VectorXd out(query.size());
  const Eigen::Index n = t.size();
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < query.size(); ++i) {
    const double q = query[i];
    if (q <= t[0]) {
      out[i] = v[0];
      continue;
    }
    if (q >= t[n - 1]) {
      out[i] = v[n - 1];
      continue;
    }
    while (j + 1 < n && t[j + 1] < q) {
      ++j;
    }
    while (j > 0 && t[j] > q) {
      --j;
    }
    const double a = (q - t[j]) / (t[j + 1] - t[j]);
    out[i] = (1.0 - a) * v[j] + a * v[j + 1];
  }
  return out;
}

SampleSeries resample_uniform(const SampleSeries& s) {
  s.validate();
  if (is_uniform(s)) {
    SampleSeries out = s;
    const Eigen::Index n = s.size();
    out.sample_rate_hint =
        static_cast<double>(n - 1) / (s.timestamps[n - 1] - s.timestamps[0]);
    return out;
  }
  const double fs = median_rate(s.timestamps);
  const double span = s.timestamps[s.size() - 1] - s.timestamps[0];
  const auto n = static_cast<Eigen::Index>(std::floor(span * fs + 1e-9)) + 1;
  SampleSeries out;
  out.timestamps = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1)) / fs;
  out.timestamps.array() += s.timestamps[0];
  out.values = interp_linear(s.timestamps, s.values, out.timestamps);
  out.sample_rate_hint = fs;
  return out;
}

}  // namespace triage::vitals
