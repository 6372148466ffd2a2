#include "triage/geoloc/ground.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace triage::geoloc {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

}  // namespace

Eigen::Vector3d localize_from_lidar(const std::vector<LidarPoint>& points, double bearing,
                                    double half_width, double cluster_gap) {
  if (!(half_width > 0.0) || !(cluster_gap > 0.0)) {
    throw std::invalid_argument("half_width and cluster_gap must be positive");
  }
  const double center = -bearing;

  struct Ranged {
    double range;
    Eigen::Vector3d p;
  };
  std::vector<Ranged> slice;
  for (const auto& pt : points) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z)) {
      continue;
    }
    const double range = std::hypot(pt.x, pt.y);
    if (range == 0.0) {
      continue;
    }
    const double az = std::atan2(pt.y, pt.x);
    if (std::abs(wrap_angle(az - center)) <= half_width) {
      slice.push_back({range, Eigen::Vector3d(pt.x, pt.y, pt.z)});
    }
  }
  if (slice.empty()) {
    throw NoPointsInWindow();
  }
  std::stable_sort(slice.begin(), slice.end(),
                   [](const Ranged& a, const Ranged& b) { return a.range < b.range; });

  Eigen::Vector3d sum = slice.front().p;
  std::size_t n = 1;
  for (std::size_t i = 1; i < slice.size(); ++i) {
    if (slice[i].range - slice[i - 1].range > cluster_gap) {
      break;
    }
    sum += slice[i].p;
    ++n;
  }
  return sum / static_cast<double>(n);
}

}  // namespace triage::geoloc
