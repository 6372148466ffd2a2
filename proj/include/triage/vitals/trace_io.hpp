#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "triage/vitals/synth.hpp"

namespace triage::vitals {

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV trace: a `modality=<name>` header line, then one row per sample:
/// timestamp followed by one value (mmwave, pcr), R,G,B (rgb) or
/// intensity,displacement,confidence (thermal).
struct Trace {
  Modality modality{Modality::Mmwave};
  SynthOutput data;
};

void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);
Trace load_trace(const std::string& path);
void save_trace(const std::string& path, const Trace& trace);

}  // namespace triage::vitals
