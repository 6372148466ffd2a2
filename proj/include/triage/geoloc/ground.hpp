#pragma once

#include <vector>

#include <Eigen/Core>

#include "triage/geoloc/projection.hpp"

namespace triage::geoloc {

/// Point in the ground robot's local frame: x forward, y left, z up.
struct LidarPoint {
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

class NoPointsInWindow : public GeolocError {
 public:
  NoPointsInWindow() : GeolocError("no lidar points inside the bearing window") {}
};

inline constexpr double kDefaultHalfWidth = 0.05;
inline constexpr double kDefaultClusterGap = 0.5;

/// Crops the scan to azimuths within `half_width` of the camera bearing,
/// splits the slice into clusters by gaps in horizontal range and returns the
/// centroid of the nearest cluster. `bearing` is positive to the right, so it
/// maps to local azimuth -bearing.
Eigen::Vector3d localize_from_lidar(const std::vector<LidarPoint>& points, double bearing,
                                    double half_width = kDefaultHalfWidth,
                                    double cluster_gap = kDefaultClusterGap);

}  // namespace triage::geoloc
