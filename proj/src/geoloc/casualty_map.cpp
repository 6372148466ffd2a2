#include "triage/geoloc/casualty_map.hpp"

#include <limits>
#include <stdexcept>

namespace triage::geoloc {

CasualtyMap::CasualtyMap(double radius) : radius_(radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("association radius must be positive");
  }
}

std::optional<CasualtyId> CasualtyMap::nearest_within(const Eigen::Vector3d& point) const {
  std::optional<CasualtyId> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& est : estimates_) {
    const double d = (est.position - point).norm();
    // estimates_ is kept in id order, so strict < keeps the lower id on ties
    if (d <= radius_ && d < best_dist) {
      best_dist = d;
      best = est.casualty_id;
    }
  }
  return best;
}

Assignment CasualtyMap::spawn(const Eigen::Vector3d& point, double weight) {
  CasualtyEstimate est;
  est.casualty_id = next_id_++;
  est.position = point;
  est.total_weight = weight;
  est.detection_count = 1;
  estimates_.push_back(est);
  return {est.casualty_id, true};
}

Assignment CasualtyMap::cluster_update(const Eigen::Vector3d& point, double weight) {
  if (!(weight > 0.0)) {
    throw std::invalid_argument("cluster_update weight must be positive");
  }
  const auto hit = nearest_within(point);
  if (!hit) {
    return spawn(point, weight);
  }
  // ids are handed out densely from zero, so the id is also the index
  auto& est = estimates_[static_cast<std::size_t>(*hit)];
  const double w = est.total_weight + weight;
  est.position = (est.position * est.total_weight + point * weight) / w;
  est.total_weight = w;
  ++est.detection_count;
  return {est.casualty_id, false};
}

Assignment CasualtyMap::associate(const Eigen::Vector3d& point) {
  if (const auto hit = nearest_within(point)) {
    return {*hit, false};
  }
  // ground-only casualty; unit weight so later aerial updates can refine it
  return spawn(point, 1.0);
}

const CasualtyEstimate* CasualtyMap::find(CasualtyId id) const {
  for (const auto& est : estimates_) {
    if (est.casualty_id == id) {
      return &est;
    }
  }
  return nullptr;
}

}  // namespace triage::geoloc
