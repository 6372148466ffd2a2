#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace triage::geoloc {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

class GeolocError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a back-projected ray never reaches the ground plane.
class RayNonIntersecting : public GeolocError {
 public:
  RayNonIntersecting() : GeolocError("ray does not intersect the ground plane") {}
};

/// Pinhole intrinsics. Pixel (u, v) has u growing to the right and v growing
/// downwards; the camera frame is x right, y down, z along the optical axis.
template <typename Scalar>
struct CameraModel {
  Scalar fx{1};
  Scalar fy{1};
  Scalar cx{0};
  Scalar cy{0};
  Scalar image_width{0};
  Scalar image_height{0};

  bool valid() const {
    return fx > 0 && fy > 0 && cx > 0 && cx < image_width && cy > 0 && cy < image_height;
  }

  bool contains(Scalar u, Scalar v) const {
    return u >= 0 && u <= image_width && v >= 0 && v <= image_height;
  }
};

/// World frame is x east, y north, z up. `orientation` maps camera-frame
/// vectors into the world frame.
template <typename Scalar>
struct SensorPose {
  Vector3<Scalar> position{Vector3<Scalar>::Zero()};
  Matrix3<Scalar> orientation{Matrix3<Scalar>::Identity()};

  bool valid(Scalar tol = Scalar(1e-9)) const {
    const Matrix3<Scalar> gram = orientation.transpose() * orientation;
    return (gram - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(orientation.determinant() - Scalar(1)) <= tol;
  }
};

template <typename Scalar>
struct Detection {
  Scalar pixel_u{0};
  Scalar pixel_v{0};
  double timestamp{0.0};
  std::string source_robot;
};

using CameraModeld = CameraModel<double>;
using SensorPosed = SensorPose<double>;
using Detectiond = Detection<double>;

/// Camera looking straight down: image right is east, image down is south.
template <typename Scalar = double>
Matrix3<Scalar> nadir_orientation(Scalar yaw = Scalar(0)) {
  Matrix3<Scalar> base;
  base << 1, 0, 0,
          0, -1, 0,
          0, 0, -1;
  return Eigen::AngleAxis<Scalar>(yaw, Vector3<Scalar>::UnitZ()).toRotationMatrix() * base;
}

/// Camera with a horizontal optical axis pointing along `heading` (radians,
/// counter-clockwise from east), image down pointing to world down.
template <typename Scalar = double>
Matrix3<Scalar> level_orientation(Scalar heading = Scalar(0)) {
  const Scalar c = std::cos(heading);
  const Scalar s = std::sin(heading);
  Matrix3<Scalar> r;
  // columns: camera x (right), camera y (down), camera z (forward)
  r << s, 0, c,
      -c, 0, s,
       0, -1, 0;
  return r;
}

/// Unit ray through a pixel, in the camera frame.
template <typename Scalar>
Vector3<Scalar> pixel_ray(Scalar u, Scalar v, const CameraModel<Scalar>& cam) {
  return Vector3<Scalar>((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, Scalar(1)).normalized();
}

/// Back-projects a detection through the camera and intersects the ray with
/// the plane z = ground_z.
template <typename Scalar>
Vector3<Scalar> pixel_to_world(const Detection<Scalar>& det, const CameraModel<Scalar>& cam,
                               const SensorPose<Scalar>& pose, Scalar ground_z = Scalar(0)) {
  const Vector3<Scalar> ray = pose.orientation * pixel_ray(det.pixel_u, det.pixel_v, cam);
  if (ray.z() >= Scalar(-1e-9)) {
    throw RayNonIntersecting();
  }
  const Scalar t = (ground_z - pose.position.z()) / ray.z();
  if (t <= Scalar(0)) {
    // camera at or below the plane
    throw RayNonIntersecting();
  }
  Vector3<Scalar> hit = pose.position + t * ray;
  hit.z() = ground_z;
  return hit;
}

/// Pinhole projection of a world point. Returns false when the point is
/// behind the camera.
template <typename Scalar>
bool world_to_pixel(const Vector3<Scalar>& point, const CameraModel<Scalar>& cam,
                    const SensorPose<Scalar>& pose, Scalar& u, Scalar& v) {
  const Vector3<Scalar> pc = pose.orientation.transpose() * (point - pose.position);
  if (pc.z() <= Scalar(0)) {
    return false;
  }
  u = cam.fx * pc.x() / pc.z() + cam.cx;
  v = cam.fy * pc.y() / pc.z() + cam.cy;
  return true;
}

inline constexpr double kMinDetectionWeight = 0.1;

/// Confidence of a detection from its radial distance to the principal point:
/// max(w_min, 1 - r / r_max), r_max being the distance to the farthest corner.
template <typename Scalar>
Scalar detection_weight(Scalar u, Scalar v, const CameraModel<Scalar>& cam,
                        Scalar w_min = Scalar(kMinDetectionWeight)) {
  const Scalar dx = std::max(cam.cx, cam.image_width - cam.cx);
  const Scalar dy = std::max(cam.cy, cam.image_height - cam.cy);
  const Scalar r_max = std::hypot(dx, dy);
  const Scalar r = std::hypot(u - cam.cx, v - cam.cy);
  return std::max(w_min, Scalar(1) - r / r_max);
}

template <typename Scalar>
Scalar detection_weight(const Detection<Scalar>& det, const CameraModel<Scalar>& cam) {
  return detection_weight(det.pixel_u, det.pixel_v, cam);
}

/// Horizontal bearing of an image column relative to the optical axis,
/// positive to the right.
template <typename Scalar>
Scalar bearing_from_pixel(Scalar centroid_u, const CameraModel<Scalar>& cam) {
  return std::atan((centroid_u - cam.cx) / cam.fx);
}

/// Rotates a local (x forward, y left) offset by `heading` (counter-clockwise
/// from east) and translates it by the robot's world position. z is carried
/// through from the local point.
template <typename Scalar>
Vector3<Scalar> local_to_world(const Vector3<Scalar>& local, Scalar heading,
                               const Vector3<Scalar>& gps) {
  const Eigen::Rotation2D<Scalar> rot(heading);
  const Eigen::Matrix<Scalar, 2, 1> xy = rot * local.template head<2>() + gps.template head<2>();
  return Vector3<Scalar>(xy.x(), xy.y(), local.z());
}

}  // namespace triage::geoloc
