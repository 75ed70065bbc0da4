#include "sttsim/trace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sttsim/rng.hpp"

namespace sttsim {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& why) {
    std::ostringstream msg;
    msg << "trace line " << line_no << ": " << why;
    throw TraceError(msg.str());
}

} // namespace

std::vector<MemoryRequest> parse_trace(std::istream& in) {
    std::vector<MemoryRequest> trace;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = strip(raw);
        if (line.empty()) continue;

        std::istringstream fields(line);
        std::string op, addr_text, extra;
        fields >> op >> addr_text;
        if (fields >> extra) bad_line(line_no, "trailing fields");
        if (op != "R" && op != "W") {
            bad_line(line_no, "expected R or W, got '" + op + "'");
        }
        if (addr_text.empty()) bad_line(line_no, "missing address");

        std::string digits = addr_text;
        if (digits.size() > 2 && (digits[0] == '0') &&
            (digits[1] == 'x' || digits[1] == 'X')) {
            digits = digits.substr(2);
        }
        if (digits.empty() ||
            digits.find_first_not_of("0123456789abcdefABCDEF") !=
                std::string::npos ||
            digits.size() > 16) {
            bad_line(line_no, "bad hex address '" + addr_text + "'");
        }

        MemoryRequest req;
        req.index = trace.size();
        req.kind = op == "R" ? MemoryRequest::Kind::read
                             : MemoryRequest::Kind::write;
        req.address = std::stoull(digits, nullptr, 16);
        trace.push_back(req);
    }
    return trace;
}

std::vector<MemoryRequest> load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open trace file: " + path);
    return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<MemoryRequest>& trace) {
    for (const auto& req : trace) {
        out << (req.kind == MemoryRequest::Kind::read ? "R 0x" : "W 0x")
            << std::hex << req.address << std::dec << '\n';
    }
}

std::uint64_t trace_digest(const std::vector<MemoryRequest>& trace) {
    std::uint64_t h = kFnvOffset;
    for (const auto& req : trace) {
        const char op = req.kind == MemoryRequest::Kind::read ? 'R' : 'W';
        h ^= static_cast<unsigned char>(op);
        h *= kFnvPrime;
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<unsigned char>(req.address >> (8 * i));
            h *= kFnvPrime;
        }
    }
    return h;
}

void SyntheticTraceSpec::validate() const {
    if (line_size == 0 || (line_size & (line_size - 1)) != 0) {
        throw ConfigError("trace line size must be a power of two");
    }
    if (working_set_bytes < line_size) {
        throw ConfigError("trace working set must hold at least one line");
    }
    if (!(zipf_alpha >= 0.0) || !std::isfinite(zipf_alpha)) {
        throw ConfigError("trace zipf alpha must be finite and >= 0");
    }
    if (!(write_fraction >= 0.0) || !(write_fraction <= 1.0)) {
        throw ConfigError("trace write fraction must be in [0, 1]");
    }
    if (!(stride_fraction >= 0.0) || !(stride_fraction <= 1.0)) {
        throw ConfigError("trace stride fraction must be in [0, 1]");
    }
}

std::vector<MemoryRequest> generate_trace(const SyntheticTraceSpec& spec,
                                          std::uint64_t seed) {
    spec.validate();
    const std::uint64_t lines = spec.working_set_bytes / spec.line_size;

    // cumulative zipf table over line ranks; rank == line index
    std::vector<double> cdf(lines);
    double total = 0.0;
    for (std::uint64_t r = 0; r < lines; ++r) {
        total += 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_alpha);
        cdf[r] = total;
    }
    for (auto& v : cdf) v /= total;

    Xoshiro256 rng(hash_mix(seed, 0x7261636574ULL)); // keyed off "trace"
    std::vector<MemoryRequest> trace;
    trace.reserve(spec.length);
    std::uint64_t cursor = 0; // last line touched, for stride continuation
    for (std::uint64_t i = 0; i < spec.length; ++i) {
        std::uint64_t line;
        if (rng.next_unit() < spec.stride_fraction) {
            line = (cursor + 1) % lines;
        } else {
            const double u = rng.next_unit();
            line = static_cast<std::uint64_t>(
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            if (line >= lines) line = lines - 1;
        }
        cursor = line;

        MemoryRequest req;
        req.index = i;
        req.kind = rng.next_unit() < spec.write_fraction
                       ? MemoryRequest::Kind::write
                       : MemoryRequest::Kind::read;
        req.address = spec.base_address + line * spec.line_size;
        trace.push_back(req);
    }
    return trace;
}

} // namespace sttsim
