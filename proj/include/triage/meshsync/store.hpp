#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace triage::meshsync {

using NodeId = std::string;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RecordKey {
  NodeId origin;
  std::string stream;
  std::uint64_t seq{0};

  auto operator<=>(const RecordKey&) const = default;
};

/// Payload bytes are opaque and never modified after creation.
struct Record {
  RecordKey key;
  std::string payload;
  double created_at{0.0};

  bool operator==(const Record&) const = default;
};

/// (origin, stream)
using StreamId = std::pair<NodeId, std::string>;

/// Highest contiguous seq held per (origin, stream).
using Digest = std::map<StreamId, std::uint64_t>;

/// Sync order of streams: lower rank goes first. Unlisted streams share the
/// last rank and fall back to name order.
int stream_priority(const std::string& stream);

/// Append-only replica owned by one node. Records authored here come from
/// put_local; everything else arrives through insert.
class Store {
 public:
  explicit Store(NodeId id);

  const NodeId& id() const { return id_; }

  RecordKey put_local(const std::string& stream, std::string payload, double created_at);

  /// Adds a replicated record. Returns false if the key is already held;
  /// throws MeshError when a held key arrives with different content.
  bool insert(const Record& record);

  Digest digest() const;

  const Record* get(const RecordKey& key) const;

  /// Records of one (origin, stream) with seq in [first, last].
  std::vector<const Record*> range(const StreamId& sid, std::uint64_t first, std::uint64_t last) const;

  /// All records ordered by (origin, stream, seq).
  std::vector<Record> records() const;

  /// All records on `stream`, from every origin, ordered by (origin, seq).
  std::vector<const Record*> stream_records(const std::string& stream) const;

  std::size_t size() const { return count_; }

 private:
  NodeId id_;
  std::map<StreamId, std::map<std::uint64_t, Record>> streams_;
  std::size_t count_{0};
};

/// Inclusive seq range of one (origin, stream).
struct KeyRange {
  NodeId origin;
  std::string stream;
  std::uint64_t first{0};
  std::uint64_t last{0};

  bool operator==(const KeyRange&) const = default;
};

/// Ranges held in `local`'s contiguous prefix and missing from `remote`'s,
/// ordered by stream priority, then origin.
std::vector<KeyRange> diff(const Digest& local, const Digest& remote);

}  // namespace triage::meshsync
