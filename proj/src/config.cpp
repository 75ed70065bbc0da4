#include "sttsim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "sttsim/cache.hpp"
#include "sttsim/rng.hpp"

namespace sttsim {

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::none: return "none";
        case PolicyKind::stall: return "stall";
        case PolicyKind::bypass: return "bypass";
        case PolicyKind::checkpoint_bypass: return "checkpoint_bypass";
    }
    return "?";
}

const char* to_string(AttackProfile profile) {
    return profile == AttackProfile::ramp ? "ramp" : "step";
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
    throw ConfigError("config key '" + key + "': bad value '" + value +
                      "' (expected " + expected + ")");
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        bad_value(key, v, "unsigned integer");
    }
    return out;
}

std::uint32_t parse_u32(const std::string& v, const std::string& key) {
    const std::uint64_t out = parse_u64(v, key);
    if (out > std::numeric_limits<std::uint32_t>::max()) {
        bad_value(key, v, "32-bit unsigned integer");
    }
    return static_cast<std::uint32_t>(out);
}

double parse_dbl(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(out)) {
            bad_value(key, v, "finite number");
        }
        return out;
    } catch (const std::logic_error&) {
        bad_value(key, v, "finite number");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v, "true or false");
}

PolicyKind parse_policy(const std::string& v, const std::string& key) {
    if (v == "none") return PolicyKind::none;
    if (v == "stall") return PolicyKind::stall;
    if (v == "bypass") return PolicyKind::bypass;
    if (v == "checkpoint_bypass") return PolicyKind::checkpoint_bypass;
    bad_value(key, v, "none|stall|bypass|checkpoint_bypass");
}

AttackProfile parse_profile(const std::string& v, const std::string& key) {
    if (v == "ramp") return AttackProfile::ramp;
    if (v == "step") return AttackProfile::step;
    bad_value(key, v, "ramp or step");
}

std::string emit_u64(std::uint64_t v) { return std::to_string(v); }
std::string emit_u32(std::uint32_t v) { return std::to_string(v); }
std::string emit_dbl(double v) { return format_double(v); }
std::string emit_bool(bool v) { return v ? "true" : "false"; }
std::string emit_policy(PolicyKind v) { return to_string(v); }
std::string emit_profile(AttackProfile v) { return to_string(v); }
std::string emit_str(const std::string& v) { return v; }
std::string parse_str(const std::string& v, const std::string&) { return v; }

AttackEpisode parse_episode(const std::string& v, const std::string& key) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : v) {
        if (ch == ',') {
            parts.push_back(strip(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(strip(cur));
    if (parts.size() != 4) {
        bad_value(key, v, "start,end,ramp|step,peak");
    }
    AttackEpisode ep;
    ep.start_cycle = parse_u64(parts[0], key);
    ep.end_cycle = parse_u64(parts[1], key);
    ep.profile = parse_profile(parts[2], key);
    ep.peak_strength = parse_dbl(parts[3], key);
    return ep;
}

std::string emit_episode(const AttackEpisode& ep) {
    std::ostringstream out;
    out << ep.start_cycle << ',' << ep.end_cycle << ','
        << to_string(ep.profile) << ',' << format_double(ep.peak_strength);
    return out.str();
}

// One row per key keeps parse, emit, and env lookup from drifting apart.
// attack.episode is repeatable and handled outside the table.
#define STTSIM_CONFIG_KEYS(X)                                         \
    X("sim.seed", u64, c.seed)                                        \
    X("sim.clock_hz", dbl, c.clock_hz)                                \
    X("sim.line_size", u32, c.line_size)                              \
    X("sim.lookaside", bool, c.lookaside)                             \
    X("sim.exclusivity_check_interval", u64,                          \
      c.exclusivity_check_interval)                                   \
    X("l1.size", u64, c.l1.size)                                      \
    X("l1.ways", u32, c.l1.ways)                                      \
    X("l1.latency", u64, c.l1.latency)                                \
    X("l2.size", u64, c.l2.size)                                      \
    X("l2.ways", u32, c.l2.ways)                                      \
    X("l2.latency", u64, c.l2.latency)                                \
    X("llc.enabled", bool, c.llc.enabled)                             \
    X("llc.size", u64, c.llc.size)                                    \
    X("llc.ways", u32, c.llc.ways)                                    \
    X("llc.banks", u32, c.llc.banks)                                  \
    X("llc.wb_entries", u32, c.llc.wb_entries)                        \
    X("llc.read_latency", u64, c.llc.read_latency)                    \
    X("llc.write_latency", u64, c.llc.write_latency)                  \
    X("llc.invalidate_cost", u64, c.llc.invalidate_cost)              \
    X("mem.latency", u64, c.mem_latency)                              \
    X("mtj.fit_constant", dbl, c.mtj.fit_constant_s)                  \
    X("mtj.fit_exponent", dbl, c.mtj.fit_exponent)                    \
    X("mtj.energy_barrier", dbl, c.mtj.energy_barrier_j)              \
    X("mtj.boltzmann", dbl, c.mtj.boltzmann_j_per_k)                  \
    X("mtj.temperature", dbl, c.mtj.nominal_temperature_k)            \
    X("mtj.critical_strength", dbl, c.mtj.critical_strength)          \
    X("sensor.threshold", dbl, c.sensor.sensor_threshold)             \
    X("sensor.functional_threshold", dbl,                             \
      c.sensor.functional_threshold)                                  \
    X("sensor.sample_interval", u64, c.sensor.sample_interval)        \
    X("sensor.lead_cycles", u64, c.sensor.lead_cycles)                \
    X("attack.sweep_profile", profile, c.sweep_profile)               \
    X("attack.sweep_peak", dbl, c.sweep_peak)                         \
    X("policy.mode", policy, c.policy)                                \
    X("policy.bypass_fills", bool, c.bypass_fills)                    \
    X("checkpoint.interval", u64, c.checkpoint.interval)              \
    X("checkpoint.adaptive", bool, c.checkpoint.adaptive)             \
    X("checkpoint.register_save_cost", u64,                           \
      c.checkpoint.register_save_cost)                                \
    X("checkpoint.volatile_bits", bool, c.checkpoint.volatile_bits)   \
    X("energy.l1_access", dbl, c.energy.l1_access)                    \
    X("energy.l2_access", dbl, c.energy.l2_access)                    \
    X("energy.llc_read", dbl, c.energy.llc_read)                      \
    X("energy.llc_write", dbl, c.energy.llc_write)                    \
    X("energy.mem_access", dbl, c.energy.mem_access)                  \
    X("energy.buffer_op", dbl, c.energy.buffer_op)                    \
    X("energy.checkpoint_overhead", dbl,                              \
      c.energy.checkpoint_overhead)                                   \
    X("trace.file", str, c.trace.file)                                \
    X("trace.length", u64, c.trace.length)                            \
    X("trace.working_set", u64, c.trace.working_set)                  \
    X("trace.zipf_alpha", dbl, c.trace.zipf_alpha)                    \
    X("trace.write_fraction", dbl, c.trace.write_fraction)            \
    X("trace.stride_fraction", dbl, c.trace.stride_fraction)          \
    X("trace.seed", u64, c.trace.seed)

bool apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "attack.episode") {
        c.attack.episodes.push_back(parse_episode(value, key));
        return true;
    }
#define X(NAME, KIND, FIELD)                                          \
    if (key == NAME) {                                                \
        FIELD = parse_##KIND(value, key);                             \
        return true;                                                  \
    }
    STTSIM_CONFIG_KEYS(X)
#undef X
    return false;
}

std::string env_name(const std::string& key) {
    std::string out = "STTSIM_";
    for (char ch : key) {
        out += ch == '.' ? '_'
                         : static_cast<char>(
                               std::toupper(static_cast<unsigned char>(ch)));
    }
    return out;
}

void apply_env_overrides(RunConfig& c) {
    std::vector<std::string> keys;
#define X(NAME, KIND, FIELD) keys.emplace_back(NAME);
    STTSIM_CONFIG_KEYS(X)
#undef X
    for (const auto& key : keys) {
        if (const char* v = std::getenv(env_name(key).c_str())) {
            apply_key(c, key, strip(v));
        }
    }
    // semicolon-separated episode list replaces any file-specified waveform
    if (const char* v = std::getenv("STTSIM_ATTACK_EPISODE")) {
        c.attack.episodes.clear();
        std::istringstream list(v);
        std::string item;
        while (std::getline(list, item, ';')) {
            const std::string ep = strip(item);
            if (!ep.empty()) apply_key(c, "attack.episode", ep);
        }
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text, bool apply_env) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = strip(raw);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'section.key = value'");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (!apply_key(c, key, value)) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        }
    }
    if (apply_env) apply_env_overrides(c);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path, bool apply_env) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), apply_env);
}

void RunConfig::validate() const {
    if (!(clock_hz > 0.0) || !std::isfinite(clock_hz)) {
        throw ConfigError("sim.clock_hz must be finite and > 0");
    }
    CacheGeometry{l1.size, l1.ways, line_size}.validate();
    CacheGeometry{l2.size, l2.ways, line_size}.validate();
    if (l1.latency == 0 || l2.latency == 0 || mem_latency == 0) {
        throw ConfigError("latencies must be >= 1");
    }
    if (llc.enabled) {
        CacheGeometry{llc.size, llc.ways, line_size}.validate();
        if (llc.banks == 0 || llc.wb_entries == 0) {
            throw ConfigError("llc.banks and llc.wb_entries must be >= 1");
        }
        if (llc.read_latency == 0 || llc.write_latency == 0) {
            throw ConfigError("llc latencies must be >= 1");
        }
    }
    try {
        mtj.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    sensor.validate();
    attack.validate();
    if (!(sweep_peak > 0.0) || !std::isfinite(sweep_peak)) {
        throw ConfigError("attack.sweep_peak must be finite and > 0");
    }
    if (checkpoint.interval == 0) {
        throw ConfigError("checkpoint.interval must be >= 1");
    }
    if (policy != PolicyKind::none && !llc.enabled) {
        throw ConfigError("mitigation policies require llc.enabled = true");
    }
    for (double v : {energy.l1_access, energy.l2_access, energy.llc_read,
                     energy.llc_write, energy.mem_access, energy.buffer_op,
                     energy.checkpoint_overhead}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("energy costs must be finite and >= 0");
        }
    }
    if (trace.file.empty() && trace.length > 0) {
        synthetic_spec().validate();
    }
}

SyntheticTraceSpec RunConfig::synthetic_spec() const {
    SyntheticTraceSpec spec;
    spec.length = trace.length;
    spec.working_set_bytes = trace.working_set;
    spec.zipf_alpha = trace.zipf_alpha;
    spec.write_fraction = trace.write_fraction;
    spec.stride_fraction = trace.stride_fraction;
    spec.line_size = line_size;
    return spec;
}

std::string RunConfig::canonical_text() const {
    const RunConfig& c = *this;
    std::ostringstream out;
#define X(NAME, KIND, FIELD) out << NAME << " = " << emit_##KIND(FIELD) << '\n';
    STTSIM_CONFIG_KEYS(X)
#undef X
    for (const auto& ep : attack.episodes) {
        out << "attack.episode = " << emit_episode(ep) << '\n';
    }
    return out.str();
}

std::uint64_t RunConfig::config_hash() const {
    return fnv1a64(canonical_text());
}

std::uint64_t RunConfig::geometry_hash() const {
    std::ostringstream out;
    out << line_size << '|' << lookaside << '|' << l1.size << ',' << l1.ways
        << ',' << l1.latency << '|' << l2.size << ',' << l2.ways << ','
        << l2.latency << '|' << llc.enabled << ',' << llc.size << ','
        << llc.ways << ',' << llc.banks << ',' << llc.wb_entries << ','
        << llc.read_latency << ',' << llc.write_latency << ','
        << llc.invalidate_cost << '|' << mem_latency;
    return fnv1a64(out.str());
}

} // namespace sttsim
