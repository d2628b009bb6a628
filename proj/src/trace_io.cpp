#include "zonodpp/trace_io.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zonodpp/errors.hpp"

namespace zonodpp {

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  out << "step,basis,accepted,elapsed_ns\n";
  for (const StepRecord& rec : trace.steps) {
    out << rec.step << ',';
    for (std::size_t i = 0; i < rec.basis.indices.size(); ++i) {
      if (i > 0) out << ' ';
      out << rec.basis.indices[i];
    }
    out << ',' << (rec.accepted ? 1 : 0) << ',' << rec.elapsed_ns << '\n';
  }
}

void write_trace_jsonl(std::ostream& out, const ChainTrace& trace) {
  for (const StepRecord& rec : trace.steps) {
    nlohmann::json line = {
        {"step", rec.step},
        {"basis", rec.basis.indices},
        {"accepted", rec.accepted ? 1 : 0},
        {"elapsed_ns", rec.elapsed_ns},
    };
    out << line.dump() << '\n';
  }
}

ChainTrace read_trace_csv(std::istream& in, SamplerKind kind) {
  ChainTrace trace;
  trace.kind = kind;
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("trace CSV is empty");
  }
  if (line != "step,basis,accepted,elapsed_ns") {
    throw ConfigError("trace CSV line 1: unexpected header '" + line + "'");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = [lineno] {
      return "trace CSV line " + std::to_string(lineno) + ": ";
    };
    std::array<std::string, 4> field;
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = line.find(',', start);
      if (f < 3 && comma == std::string::npos) {
        throw ConfigError(where() + "expected 4 comma-separated fields");
      }
      field[f] = line.substr(start, comma - start);
      start = comma + 1;
    }
    StepRecord rec;
    try {
      rec.step = std::stoll(field[0]);
      std::istringstream basis_ss(field[1]);
      int idx;
      while (basis_ss >> idx) rec.basis.indices.push_back(idx);
      const int accepted = std::stoi(field[2]);
      if (accepted != 0 && accepted != 1) {
        throw ConfigError(where() + "accepted must be 0 or 1");
      }
      rec.accepted = accepted == 1;
      rec.elapsed_ns = std::stoll(field[3]);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(where() + "cannot parse record '" + line + "'");
    }
    for (std::size_t i = 1; i < rec.basis.indices.size(); ++i) {
      if (rec.basis.indices[i] <= rec.basis.indices[i - 1]) {
        throw ConfigError(where() + "basis indices must be ascending");
      }
    }
    trace.proposed += 1;
    trace.accepted += rec.accepted ? 1 : 0;
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

void save_trace(const std::string& path, const ChainTrace& trace,
                const std::string& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open trace file for writing: " + path);
  if (format == "csv") {
    write_trace_csv(out, trace);
  } else if (format == "jsonl") {
    write_trace_jsonl(out, trace);
  } else {
    throw ConfigError("unknown trace format '" + format + "'");
  }
  out.flush();
  if (!out) throw Error("failed writing trace file: " + path);
}

ChainTrace load_trace_csv(const std::string& path, SamplerKind kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file: " + path);
  try {
    return read_trace_csv(in, kind);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace zonodpp
