#ifndef ZONODPP_TRACE_IO_HPP
#define ZONODPP_TRACE_IO_HPP

#include <iosfwd>
#include <string>

#include "zonodpp/samplers.hpp"

namespace zonodpp {

// CSV schema: header "step,basis,accepted,elapsed_ns"; basis is the ascending
// indices joined by single spaces; elapsed_ns is cumulative wall clock, or 0
// when the run was executed with timing disabled.
void write_trace_csv(std::ostream& out, const ChainTrace& trace);

// Same records as JSON lines:
// {"step":0,"basis":[1,3],"accepted":1,"elapsed_ns":0}
void write_trace_jsonl(std::ostream& out, const ChainTrace& trace);

// Parses the CSV schema; malformed input raises ConfigError with a line
// number. Proposal counts are not serialized, so the loaded trace treats
// every step as a proposal.
ChainTrace read_trace_csv(std::istream& in, SamplerKind kind);

void save_trace(const std::string& path, const ChainTrace& trace,
                const std::string& format);  // "csv" or "jsonl"
ChainTrace load_trace_csv(const std::string& path, SamplerKind kind);

}  // namespace zonodpp

#endif
