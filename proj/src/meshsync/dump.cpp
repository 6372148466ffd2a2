#include "triage/meshsync/dump.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "triage/meshsync/base64.hpp"

namespace triage::meshsync {

namespace {

void check_field(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of("\t\n\r") != std::string::npos) {
    throw MeshError(std::string(what) + " must be non-empty and free of tabs and newlines");
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

void dump_store(std::ostream& out, const Store& store) {
  char num[32];
  for (const auto& rec : store.records()) {
    check_field(rec.key.origin, "origin");
    check_field(rec.key.stream, "stream");
    out << rec.key.origin << '\t' << rec.key.stream << '\t' << rec.key.seq << '\t';
    const auto res = std::to_chars(num, num + sizeof num, rec.created_at);
    out.write(num, res.ptr - num);
    out << '\t' << base64_encode(rec.payload) << '\n';
  }
}

std::string dump_store(const Store& store) {
  std::ostringstream out;
  dump_store(out, store);
  return out.str();
}

void load_store(std::istream& in, Store& store) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fail = [lineno](const std::string& why) {
      return MeshError("dump line " + std::to_string(lineno) + ": " + why);
    };
    const auto parts = split_tabs(line);
    if (parts.size() != 5) {
      throw fail("expected 5 tab-separated fields");
    }
    Record rec;
    rec.key.origin = std::string(parts[0]);
    rec.key.stream = std::string(parts[1]);
    if (rec.key.origin.empty() || rec.key.stream.empty()) {
      throw fail("empty origin or stream");
    }
    const auto seq_res = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), rec.key.seq);
    if (seq_res.ec != std::errc{} || seq_res.ptr != parts[2].data() + parts[2].size() || rec.key.seq == 0) {
      throw fail("bad seq");
    }
    const auto t_res = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), rec.created_at);
    if (t_res.ec != std::errc{} || t_res.ptr != parts[3].data() + parts[3].size()) {
      throw fail("bad created_at");
    }
    try {
      rec.payload = base64_decode(parts[4]);
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    store.insert(rec);
  }
}

}  // namespace triage::meshsync
