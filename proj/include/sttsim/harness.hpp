#pragma once

#include <string>
#include <vector>

#include "sttsim/config.hpp"
#include "sttsim/engine.hpp"
#include "sttsim/metrics.hpp"
#include "sttsim/trace.hpp"

// One-shot runs and parameter sweeps. A sweep reuses a single resolved
// trace for every row so rows stay comparable, and resolves duration
// percentages against the in-sweep no-attack baseline.

namespace sttsim {

// trace.file wins over the synthetic spec; both absent means empty trace.
std::vector<MemoryRequest> resolve_trace(const RunConfig& cfg);

SimReport run_simulation(const RunConfig& cfg);
SimReport run_simulation(const RunConfig& cfg,
                         const std::vector<MemoryRequest>& trace);

struct SweepRow {
    std::string axis;
    std::string value;
    double slowdown = 1.0;        // vs the row's no-attack baseline
    double energy_overhead = 0.0; // vs the same baseline
    SimReport report;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

// Axes: "duration" ({0,25,50,75,100}% of the no-attack run, 100% open
// ended), "policy" (all four policies under a 50% gradual window), and
// "checkpoint_interval" (x{1/4,1/2,1,2,4} under the same window).
// Throws ConfigError for an unknown axis.
SweepResult run_sweep(const RunConfig& base, const std::string& axis);

// Attack window covering `pct` percent of a baseline run of `total` cycles,
// shaped by cfg.sweep_profile/cfg.sweep_peak (ramp leads in over at most
// sensor.lead_cycles). Exposed for tests that cross-check sweep rows.
std::vector<AttackEpisode> make_duration_attack(const RunConfig& cfg,
                                                Cycle total, unsigned pct);

std::string report_to_json_text(const SimReport& report);
std::string report_to_csv_text(const SimReport& report);
std::string sweep_to_csv_text(const SweepResult& sweep);

} // namespace sttsim
