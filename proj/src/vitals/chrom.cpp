#include "triage/vitals/chrom.hpp"

#include <cmath>

namespace triage::vitals {

namespace {

double stddev(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size()));
}

Eigen::MatrixX3d normalised_channels(const RgbTrace& trace) {
  trace.validate();
  if (trace.size() < kChromMinFrames) {
    throw VitalsError(VitalsErrc::SeriesTooShort, "need at least 64 frames");
  }
  Eigen::MatrixX3d n(trace.size(), 3);
  for (int c = 0; c < 3; ++c) {
    const double mean = trace.rgb.col(c).mean();
    if (!(mean > 0.0)) {
      throw VitalsError(VitalsErrc::DegenerateTrace, "channel has zero mean");
    }
    n.col(c) = trace.rgb.col(c) / mean;
    if (stddev(n.col(c)) < 1e-12) {
      throw VitalsError(VitalsErrc::DegenerateTrace, "channel has no variance");
    }
  }
  return n;
}

SampleSeries make_series(const RgbTrace& trace, Eigen::VectorXd v) {
  SampleSeries s;
  s.timestamps = trace.timestamps;
  s.values = std::move(v);
  s.sample_rate_hint = median_rate(trace.timestamps);
  return s;
}

}  // namespace

SampleSeries chrom_bvp(const RgbTrace& trace) {
  const Eigen::MatrixX3d n = normalised_channels(trace);
  const Eigen::VectorXd x = 3.0 * n.col(0) - 2.0 * n.col(1);
  const Eigen::VectorXd y = 1.5 * n.col(0) + n.col(1) - 1.5 * n.col(2);
  const double sy = stddev(y);
  if (sy < 1e-12) {
    throw VitalsError(VitalsErrc::DegenerateTrace, "chrominance Y has no variance");
  }
  const double alpha = stddev(x) / sy;
  Eigen::VectorXd bvp = x - alpha * y;
  bvp.array() -= bvp.mean();
  return make_series(trace, std::move(bvp));
}

SampleSeries green_bvp(const RgbTrace& trace) {
  const Eigen::MatrixX3d n = normalised_channels(trace);
  Eigen::VectorXd g = n.col(1);
  g.array() -= g.mean();
  return make_series(trace, std::move(g));
}

}  // namespace triage::vitals
