#pragma once

#include <cstdint>
#include <string>

#include "sttsim/attack.hpp"
#include "sttsim/physics.hpp"
#include "sttsim/trace.hpp"
#include "sttsim/types.hpp"

// Run configuration. Text format is flat "section.key = value" lines with
// '#' comments; unknown keys are rejected (typos must not silently change
// results). attack.episode is repeatable: "start,end,ramp|step,peak".
// Environment variables STTSIM_<SECTION>_<KEY> override file values.

namespace sttsim {

enum class PolicyKind { none, stall, bypass, checkpoint_bypass };

const char* to_string(PolicyKind kind);
const char* to_string(AttackProfile profile);

struct RunConfig {
    // sim
    std::uint64_t seed = 1;
    double clock_hz = 2.0e9;
    std::uint32_t line_size = 64;
    bool lookaside = true; // false = serialized look-through LLC probe
    std::uint64_t exclusivity_check_interval = 0; // accesses; 0 = off

    struct Level {
        std::uint64_t size;
        std::uint32_t ways;
        Cycle latency;
    };
    Level l1{16 * 1024, 4, 2};
    Level l2{256 * 1024, 8, 8};

    struct Llc {
        bool enabled = true;
        std::uint64_t size = 8 * 1024 * 1024;
        std::uint32_t ways = 8;
        std::uint32_t banks = 4;
        std::uint32_t wb_entries = 8; // per bank
        Cycle read_latency = 17;
        Cycle write_latency = 34;
        Cycle invalidate_cost = 1;
    };
    Llc llc;

    Cycle mem_latency = 100;

    MtjParams mtj;
    SensorConfig sensor;
    AttackWaveform attack;
    // Waveform shape used when a sweep synthesizes attack windows.
    AttackProfile sweep_profile = AttackProfile::ramp;
    double sweep_peak = 2.5;

    PolicyKind policy = PolicyKind::none;
    bool bypass_fills = false; // LLC may burn refill energy during bypass

    struct Ckpt {
        Cycle interval = 100000;
        bool adaptive = false; // halve interval after first detected attack
        Cycle register_save_cost = 100;
        bool volatile_bits = false; // hold speculative data in lines, not buffer
    };
    Ckpt checkpoint;

    struct Energy {
        double l1_access = 1.0;
        double l2_access = 2.0;
        double llc_read = 3.0;
        double llc_write = 8.0;
        double mem_access = 20.0;
        double buffer_op = 1.0;
        double checkpoint_overhead = 50.0;
    };
    Energy energy;

    struct TraceCfg {
        std::string file;                   // takes precedence when set
        std::uint64_t length = 0;           // 0 = empty trace
        std::uint64_t working_set = 2 * 1024 * 1024;
        double zipf_alpha = 0.8;
        double write_fraction = 0.25;
        double stride_fraction = 0.3;
        std::uint64_t seed = 1;
    };
    TraceCfg trace;

    void validate() const; // throws ConfigError

    SyntheticTraceSpec synthetic_spec() const;

    // Every key in schema order with all defaults materialized; parsing the
    // canonical text reproduces the config exactly.
    std::string canonical_text() const;
    std::uint64_t config_hash() const; // fnv1a64 of canonical_text
    // Digest of the fields that shape timing-comparable runs (hierarchy
    // geometry and latencies); slowdown comparisons require a match.
    std::uint64_t geometry_hash() const;
};

RunConfig parse_config_text(const std::string& text, bool apply_env = false);
RunConfig load_config(const std::string& path, bool apply_env = false);

// Deterministic shortest round-trip formatting for config and report values.
std::string format_double(double v);

} // namespace sttsim
