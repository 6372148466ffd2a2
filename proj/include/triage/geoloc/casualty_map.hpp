#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace triage::geoloc {

using CasualtyId = std::int64_t;

inline constexpr double kAssociationRadius = 2.0;

struct CasualtyEstimate {
  CasualtyId casualty_id{0};
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  double total_weight{0.0};
  int detection_count{0};
};

/// Result of adding a point to the map.
struct Assignment {
  CasualtyId casualty_id{0};
  bool created{false};
};

/// Streaming weighted-mean clustering of world-frame detections. Membership is
/// decided against the center at arrival time; clusters never merge. One id
/// counter serves aerial and ground updates, so ids are strictly increasing
/// and never reused.
class CasualtyMap {
 public:
  explicit CasualtyMap(double radius = kAssociationRadius);

  /// Aerial update: merges into the nearest center within the radius (lower
  /// id on ties) or spawns a new cluster. Weight must be positive.
  Assignment cluster_update(const Eigen::Vector3d& point, double weight);

  /// Ground association: returns the id of the nearest center within the
  /// radius without moving it, or spawns a new cluster at `point`.
  Assignment associate(const Eigen::Vector3d& point);

  /// Nearest center within the radius, if any.
  std::optional<CasualtyId> nearest_within(const Eigen::Vector3d& point) const;

  const CasualtyEstimate* find(CasualtyId id) const;
  bool contains(CasualtyId id) const { return find(id) != nullptr; }

  const std::vector<CasualtyEstimate>& estimates() const { return estimates_; }
  std::size_t size() const { return estimates_.size(); }
  CasualtyId next_id() const { return next_id_; }
  double radius() const { return radius_; }

 private:
  Assignment spawn(const Eigen::Vector3d& point, double weight);

  double radius_;
  CasualtyId next_id_{0};
  std::vector<CasualtyEstimate> estimates_;
};

}  // namespace triage::geoloc
