#include "triage/meshsync/store.hpp"

#include <algorithm>
#include <tuple>

namespace triage::meshsync {

int stream_priority(const std::string& stream) {
  if (stream == "scorecard") return 0;
  if (stream == "casualty_map") return 1;
  if (stream == "robot_pose") return 2;
  return 3;
}

Store::Store(NodeId id) : id_(std::move(id)) {}

RecordKey Store::put_local(const std::string& stream, std::string payload, double created_at) {
  auto& held = streams_[{id_, stream}];
  const std::uint64_t seq = held.empty() ? 1 : held.rbegin()->first + 1;
  Record rec{{id_, stream, seq}, std::move(payload), created_at};
  held.emplace(seq, rec);
  ++count_;
  return rec.key;
}

bool Store::insert(const Record& record) {
  if (record.key.seq == 0) {
    throw MeshError("record seq must start at 1");
  }
  auto& held = streams_[{record.key.origin, record.key.stream}];
  const auto [it, fresh] = held.emplace(record.key.seq, record);
  if (!fresh && !(it->second == record)) {
    throw MeshError("conflicting content for an existing record key");
  }
  if (fresh) {
    ++count_;
  }
  return fresh;
}

Digest Store::digest() const {
  Digest d;
  for (const auto& [sid, held] : streams_) {
    std::uint64_t prefix = 0;
    for (const auto& [seq, rec] : held) {
      if (seq != prefix + 1) {
        break;
      }
      prefix = seq;
    }
    if (!held.empty()) {
      d[sid] = prefix;
    }
  }
  return d;
}

const Record* Store::get(const RecordKey& key) const {
  const auto s = streams_.find({key.origin, key.stream});
  if (s == streams_.end()) {
    return nullptr;
  }
  const auto r = s->second.find(key.seq);
  return r == s->second.end() ? nullptr : &r->second;
}

std::vector<const Record*> Store::range(const StreamId& sid, std::uint64_t first,
                                        std::uint64_t last) const {
  std::vector<const Record*> out;
  const auto s = streams_.find(sid);
  if (s == streams_.end()) {
    return out;
  }
  for (auto it = s->second.lower_bound(first); it != s->second.end() && it->first <= last; ++it) {
    out.push_back(&it->second);
  }
  return out;
}

std::vector<Record> Store::records() const {
  std::vector<Record> out;
  out.reserve(count_);
  for (const auto& [sid, held] : streams_) {
    for (const auto& [seq, rec] : held) {
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<const Record*> Store::stream_records(const std::string& stream) const {
  std::vector<const Record*> out;
  for (const auto& [sid, held] : streams_) {
    if (sid.second != stream) {
      continue;
    }
    for (const auto& [seq, rec] : held) {
      out.push_back(&rec);
    }
  }
  return out;
}

std::vector<KeyRange> diff(const Digest& local, const Digest& remote) {
  std::vector<KeyRange> out;
  for (const auto& [sid, have] : local) {
    const auto it = remote.find(sid);
    const std::uint64_t theirs = it == remote.end() ? 0 : it->second;
    if (have > theirs) {
      out.push_back({sid.first, sid.second, theirs + 1, have});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const KeyRange& x, const KeyRange& y) {
    return std::tuple(stream_priority(x.stream), x.stream, x.origin) <
           std::tuple(stream_priority(y.stream), y.stream, y.origin);
  });
  return out;
}

}  // namespace triage::meshsync
