#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sttsim/types.hpp"

// Trace format: one request per line, "R <hex-address>" or "W <hex-address>"
// (0x prefix optional). '#' starts a comment; blank lines are ignored.

namespace sttsim {

struct MemoryRequest {
    enum class Kind : std::uint8_t { read, write };
    std::uint64_t index = 0; // position in the trace
    Kind kind = Kind::read;
    Addr address = 0;
};

// Throws TraceError with a 1-based line number on malformed input.
std::vector<MemoryRequest> parse_trace(std::istream& in);
std::vector<MemoryRequest> load_trace(const std::string& path);

void write_trace(std::ostream& out, const std::vector<MemoryRequest>& trace);

// Stable digest of the request stream; reports embed it so comparisons
// across runs can verify they saw the same workload.
std::uint64_t trace_digest(const std::vector<MemoryRequest>& trace);

// Synthetic workload: zipf-distributed line popularity over a fixed working
// set, blended with sequential strides, plus a write fraction. Pure integer
// and table-driven math, so output is byte-stable across platforms.
struct SyntheticTraceSpec {
    std::uint64_t length = 100000;         // requests
    std::uint64_t working_set_bytes = 2 * 1024 * 1024;
    double zipf_alpha = 0.8;               // 0 = uniform
    double write_fraction = 0.25;
    double stride_fraction = 0.3;          // P(next = previous line + 1)
    std::uint32_t line_size = 64;
    Addr base_address = 0x10000000;

    void validate() const; // throws ConfigError
};

std::vector<MemoryRequest> generate_trace(const SyntheticTraceSpec& spec,
                                          std::uint64_t seed);

} // namespace sttsim
