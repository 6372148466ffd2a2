#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "triage/meshsync/store.hpp"

namespace triage::meshsync {

inline constexpr double kDefaultLinkThreshold = 0.5;

struct LinkState {
  NodeId a;
  NodeId b;
  double quality{0.0};
  double threshold{kDefaultLinkThreshold};

  bool permits_sync() const { return quality >= threshold; }
};

class LinkTooWeak : public MeshError {
 public:
  LinkTooWeak() : MeshError("link quality below threshold") {}
};

struct TransferSummary {
  std::size_t a_to_b{0};
  std::size_t b_to_a{0};
  /// false when the record budget ran out before both sides converged
  bool completed{true};

  std::size_t total() const { return a_to_b + b_to_a; }
};

/// Bidirectional anti-entropy exchange. Records move whole, in stream
/// priority order and ascending seq, so a receiver's prefix never has gaps.
/// `budget` caps the number of records moved, simulating a contact that
/// drops mid-session.
TransferSummary sync_session(Store& a, Store& b, const LinkState& link,
                             std::optional<std::size_t> budget = std::nullopt);

/// Tracks link qualities and reports pairs that cross their threshold upward.
/// Unseen pairs start at quality 0.
class LinkMonitor {
 public:
  /// Sessions to run, ordered by (min node id, max node id).
  std::vector<std::pair<NodeId, NodeId>> on_link_event(const std::vector<LinkState>& changes);

  double quality(const NodeId& a, const NodeId& b) const;

 private:
  std::map<std::pair<NodeId, NodeId>, double> quality_;
};

}  // namespace triage::meshsync
