#include "triage/vitals/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace triage::vitals {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

void put_row(std::ostream& out, double t, std::initializer_list<double> values) {
  put(out, t);
  for (double v : values) {
    out.put(',');
    put(out, v);
  }
  out.put('\n');
}

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = p + line.size();
  while (true) {
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc{}) {
      throw TraceParseError("line " + std::to_string(lineno) + ": expected a number");
    }
    row.push_back(v);
    p = res.ptr;
    if (p == end) {
      break;
    }
    if (*p != ',') {
      throw TraceParseError("line " + std::to_string(lineno) + ": expected ','");
    }
    ++p;
  }
  return row;
}

std::size_t columns_for(Modality m) {
  switch (m) {
    case Modality::Mmwave:
    case Modality::Pcr: return 2;
    case Modality::Rgb:
    case Modality::Thermal: return 4;
  }
  return 0;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace) {
  out << "modality=" << to_string(trace.modality) << '\n';
  if (const auto* s = std::get_if<SampleSeries>(&trace.data)) {
    for (Eigen::Index i = 0; i < s->size(); ++i) {
      put_row(out, s->timestamps[i], {s->values[i]});
    }
  } else if (const auto* r = std::get_if<RgbTrace>(&trace.data)) {
    for (Eigen::Index i = 0; i < r->size(); ++i) {
      put_row(out, r->timestamps[i], {r->rgb(i, 0), r->rgb(i, 1), r->rgb(i, 2)});
    }
  } else if (const auto* th = std::get_if<ThermalRoiTrace>(&trace.data)) {
    for (Eigen::Index i = 0; i < th->size(); ++i) {
      put_row(out, th->timestamps[i], {th->intensity[i], th->displacement[i], th->confidence[i]});
    }
  }
}

Trace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw TraceParseError("empty trace");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const std::string prefix = "modality=";
  if (line.rfind(prefix, 0) != 0) {
    throw TraceParseError("first line must be 'modality=<name>'");
  }
  Trace trace;
  try {
    trace.modality = modality_from_string(line.substr(prefix.size()));
  } catch (const VitalsError&) {
    throw TraceParseError("unknown modality '" + line.substr(prefix.size()) + "'");
  }
  const std::size_t cols = columns_for(trace.modality);

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto row = parse_row(line, lineno);
    if (row.size() != cols) {
      throw TraceParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                            " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t[i] = rows[static_cast<std::size_t>(i)][0];
  }
  const auto col = [&](std::size_t c) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = rows[static_cast<std::size_t>(i)][c];
    }
    return v;
  };

  try {
    switch (trace.modality) {
      case Modality::Mmwave:
      case Modality::Pcr: {
        SampleSeries s;
        s.timestamps = t;
        s.values = col(1);
        s.validate();
        s.sample_rate_hint = median_rate(t);
        trace.data = std::move(s);
        break;
      }
      case Modality::Rgb: {
        RgbTrace r;
        r.timestamps = t;
        r.rgb.resize(n, 3);
        for (int c = 0; c < 3; ++c) {
          r.rgb.col(c) = col(static_cast<std::size_t>(c) + 1);
        }
        r.validate();
        trace.data = std::move(r);
        break;
      }
      case Modality::Thermal: {
        ThermalRoiTrace th;
        th.timestamps = t;
        th.intensity = col(1);
        th.displacement = col(2);
        th.confidence = col(3);
        th.validate();
        trace.data = std::move(th);
        break;
      }
    }
  } catch (const VitalsError& e) {
    throw TraceParseError(e.what());
  }
  return trace;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TraceParseError("cannot open '" + path + "'");
  }
  return read_trace(in);
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  write_trace(out, trace);
}

}  // namespace triage::vitals
