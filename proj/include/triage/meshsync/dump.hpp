#pragma once

#include <iosfwd>
#include <string>

#include "triage/meshsync/store.hpp"

namespace triage::meshsync {

/// One record per line, tab separated: origin, stream, seq, created_at,
/// base64 payload. Lines are ordered by (origin, stream, seq).
void dump_store(std::ostream& out, const Store& store);
std::string dump_store(const Store& store);

/// Inserts every dumped record into `store`. Throws MeshError on malformed
/// lines.
void load_store(std::istream& in, Store& store);

}  // namespace triage::meshsync
