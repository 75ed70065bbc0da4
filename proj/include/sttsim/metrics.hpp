#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "sttsim/attack.hpp"
#include "sttsim/config.hpp"
#include "sttsim/types.hpp"

// Run results. Cycle buckets are disjoint by construction and sum to total;
// energy is a linear model over event counts, so the per-component values
// always reproduce the total exactly.

namespace sttsim {

struct CycleBuckets {
    Cycle total = 0;
    Cycle access = 0;        // request service, first execution
    Cycle reexec_access = 0; // request service, post-rollback re-execution
    Cycle stall = 0;         // halted waiting out an attack
    Cycle flush = 0;
    Cycle invalidate = 0;
    Cycle checkpoint = 0;
    Cycle rollback = 0;
};

struct EventCounts {
    std::uint64_t useful_requests = 0; // trace length
    std::uint64_t requests_executed = 0;
    std::uint64_t re_executed_requests = 0;
    std::uint64_t l1_hits = 0;
    std::uint64_t l1_misses = 0;
    std::uint64_t l2_hits = 0;
    std::uint64_t l2_misses = 0;
    std::uint64_t llc_hits = 0;
    std::uint64_t llc_misses = 0;
    std::uint64_t llc_forced_misses = 0; // would-be hits converted by bypass
    std::uint64_t llc_snoop_hits = 0;    // served from the masked write buffer
    std::uint64_t mem_reads = 0;
    std::uint64_t mem_writes = 0;
    std::uint64_t flushes = 0;
    std::uint64_t invalidations = 0;
    std::uint64_t checkpoints = 0;
    std::uint64_t forced_checkpoints = 0;
    std::uint64_t rollbacks = 0;
    std::uint64_t exclusivity_scans = 0;
    std::uint64_t line_flips = 0;        // LLC lines poisoned by the attack
    std::uint64_t detected_attacks = 0;  // sensor assert edges
    bool restart_required = false;
};

struct EnergyCounts {
    std::uint64_t l1_access = 0;
    std::uint64_t l2_access = 0;
    std::uint64_t llc_read = 0;
    std::uint64_t llc_write = 0;
    std::uint64_t mem_access = 0;
    std::uint64_t buffer_op = 0;
    std::uint64_t checkpoint = 0;
};

struct EnergyBreakdown {
    double l1 = 0, l2 = 0, llc_read = 0, llc_write = 0;
    double mem = 0, buffer = 0, checkpoint = 0;
    double total = 0;
};

struct EpisodeReport {
    Cycle start_cycle = 0;
    Cycle end_cycle = 0;
    AttackProfile profile = AttackProfile::ramp;
    double peak_strength = 0.0;
    AttackClass classification = AttackClass::none; // none = never asserted
    std::int64_t detection_lead = 0;
};

struct SimReport {
    std::string policy;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t trace_hash = 0;
    std::uint64_t geometry_hash = 0;
    std::string config_text; // canonical config, for exact reproduction
    std::vector<EpisodeReport> attack;
    CycleBuckets cycles;
    EventCounts events;
    EnergyCounts energy_events;
    EnergyBreakdown energy;
    std::uint64_t corrupted_reads = 0;

    nlohmann::ordered_json to_json() const;
    static SimReport from_json(const nlohmann::ordered_json& j);

    static std::string csv_header();
    std::string csv_row() const;
};

EnergyBreakdown compute_energy(const EnergyCounts& counts,
                               const RunConfig::Energy& prices);

// Both throw std::invalid_argument when the reports ran different traces or
// geometries, or when the baseline denominator is zero.
double normalized_slowdown(const SimReport& run, const SimReport& baseline);
double energy_overhead(const SimReport& run, const SimReport& baseline);

} // namespace sttsim
