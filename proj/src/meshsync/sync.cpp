#include "triage/meshsync/sync.hpp"

#include <algorithm>
#include <tuple>

namespace triage::meshsync {

TransferSummary sync_session(Store& a, Store& b, const LinkState& link,
                             std::optional<std::size_t> budget) {
  if (!link.permits_sync()) {
    throw LinkTooWeak();
  }
  struct Work {
    KeyRange range;
    bool from_a;
  };
  std::vector<Work> work;
  const Digest da = a.digest();
  const Digest db = b.digest();
  for (auto& r : diff(da, db)) {
    work.push_back({std::move(r), true});
  }
  for (auto& r : diff(db, da)) {
    work.push_back({std::move(r), false});
  }
  std::stable_sort(work.begin(), work.end(), [](const Work& x, const Work& y) {
    return std::tuple(stream_priority(x.range.stream), x.range.stream, x.range.origin, !x.from_a) <
           std::tuple(stream_priority(y.range.stream), y.range.stream, y.range.origin, !y.from_a);
  });

  TransferSummary summary;
  std::size_t left = budget.value_or(static_cast<std::size_t>(-1));
  for (const auto& w : work) {
    Store& src = w.from_a ? a : b;
    Store& dst = w.from_a ? b : a;
    const auto recs = src.range({w.range.origin, w.range.stream}, w.range.first, w.range.last);
    for (const Record* rec : recs) {
      if (left == 0) {
        summary.completed = false;
        return summary;
      }
      if (dst.insert(*rec)) {
        --left;
        (w.from_a ? summary.a_to_b : summary.b_to_a) += 1;
      }
    }
  }
  return summary;
}

std::vector<std::pair<NodeId, NodeId>> LinkMonitor::on_link_event(const std::vector<LinkState>& changes) {
  std::vector<std::pair<NodeId, NodeId>> sessions;
  for (const auto& link : changes) {
    auto pair = std::minmax(link.a, link.b);
    const std::pair<NodeId, NodeId> key{pair.first, pair.second};
    const auto it = quality_.find(key);
    const double before = it == quality_.end() ? 0.0 : it->second;
    if (before < link.threshold && link.quality >= link.threshold) {
      sessions.push_back(key);
    }
    quality_[key] = link.quality;
  }
  std::sort(sessions.begin(), sessions.end());
  sessions.erase(std::unique(sessions.begin(), sessions.end()), sessions.end());
  return sessions;
}

double LinkMonitor::quality(const NodeId& a, const NodeId& b) const {
  const auto pair = std::minmax(a, b);
  const auto it = quality_.find({pair.first, pair.second});
  return it == quality_.end() ? 0.0 : it->second;
}

}  // namespace triage::meshsync
