#include "sttsim/harness.hpp"

#include <algorithm>
#include <sstream>

namespace sttsim {

namespace {

// "100%" attacks never deassert within any plausible run.
constexpr Cycle kOpenEnd = Cycle(1) << 62;

} // namespace

std::vector<MemoryRequest> resolve_trace(const RunConfig& cfg) {
    if (!cfg.trace.file.empty()) return load_trace(cfg.trace.file);
    if (cfg.trace.length > 0) {
        return generate_trace(cfg.synthetic_spec(), cfg.trace.seed);
    }
    return {};
}

SimReport run_simulation(const RunConfig& cfg) {
    return run_simulation(cfg, resolve_trace(cfg));
}

SimReport run_simulation(const RunConfig& cfg,
                         const std::vector<MemoryRequest>& trace) {
    Engine engine(cfg, trace);
    return engine.run();
}

std::vector<AttackEpisode> make_duration_attack(const RunConfig& cfg,
                                                Cycle total, unsigned pct) {
    std::vector<AttackEpisode> episodes;
    if (pct == 0 || total == 0) return episodes;
    const Cycle duration = pct >= 100 ? kOpenEnd : total * pct / 100;
    if (cfg.sweep_profile == AttackProfile::ramp) {
        // the ramp must crest within the run it is aimed at, so the open
        // window still sizes its lead-in from the baseline length
        const Cycle scale = pct >= 100 ? total : duration;
        const Cycle lead = std::min<Cycle>(cfg.sensor.lead_cycles, scale / 2);
        if (lead >= 1 && lead + 1 <= duration) {
            episodes.push_back(
                {0, lead, AttackProfile::ramp, cfg.sweep_peak});
            episodes.push_back(
                {lead + 1, duration, AttackProfile::step, cfg.sweep_peak});
            return episodes;
        }
    }
    episodes.push_back({0, duration, AttackProfile::step, cfg.sweep_peak});
    return episodes;
}

SweepResult run_sweep(const RunConfig& base, const std::string& axis) {
    const std::vector<MemoryRequest> trace = resolve_trace(base);
    SweepResult out;

    if (axis == "duration") {
        RunConfig baseline_cfg = base;
        baseline_cfg.attack.episodes.clear();
        const SimReport baseline = run_simulation(baseline_cfg, trace);
        out.rows.push_back({axis, "0", 1.0, 0.0, baseline});
        for (const unsigned pct : {25u, 50u, 75u, 100u}) {
            RunConfig cfg = base;
            cfg.attack.episodes =
                make_duration_attack(base, baseline.cycles.total, pct);
            const SimReport report = run_simulation(cfg, trace);
            out.rows.push_back({axis, std::to_string(pct),
                                normalized_slowdown(report, baseline),
                                energy_overhead(report, baseline), report});
        }
        return out;
    }

    if (axis == "policy") {
        // one shared 50% gradual window, sized off the unmitigated baseline
        RunConfig none_cfg = base;
        none_cfg.policy = PolicyKind::none;
        none_cfg.attack.episodes.clear();
        const SimReport none_baseline = run_simulation(none_cfg, trace);
        const auto window =
            make_duration_attack(base, none_baseline.cycles.total, 50);
        for (const PolicyKind policy :
             {PolicyKind::none, PolicyKind::stall, PolicyKind::bypass,
              PolicyKind::checkpoint_bypass}) {
            RunConfig baseline_cfg = base;
            baseline_cfg.policy = policy;
            baseline_cfg.attack.episodes.clear();
            const SimReport baseline = run_simulation(baseline_cfg, trace);
            RunConfig cfg = baseline_cfg;
            cfg.attack.episodes = window;
            const SimReport report = run_simulation(cfg, trace);
            out.rows.push_back({axis, to_string(policy),
                                normalized_slowdown(report, baseline),
                                energy_overhead(report, baseline), report});
        }
        return out;
    }

    if (axis == "checkpoint_interval") {
        RunConfig none_cfg = base;
        none_cfg.policy = PolicyKind::none;
        none_cfg.attack.episodes.clear();
        const SimReport none_baseline = run_simulation(none_cfg, trace);
        const auto window =
            make_duration_attack(base, none_baseline.cycles.total, 50);
        const Cycle pivot = base.checkpoint.interval;
        for (const Cycle interval :
             {std::max<Cycle>(1, pivot / 4), std::max<Cycle>(1, pivot / 2),
              pivot, pivot * 2, pivot * 4}) {
            RunConfig baseline_cfg = base;
            baseline_cfg.policy = PolicyKind::checkpoint_bypass;
            baseline_cfg.checkpoint.interval = interval;
            baseline_cfg.attack.episodes.clear();
            const SimReport baseline = run_simulation(baseline_cfg, trace);
            RunConfig cfg = baseline_cfg;
            cfg.attack.episodes = window;
            const SimReport report = run_simulation(cfg, trace);
            out.rows.push_back({axis, std::to_string(interval),
                                normalized_slowdown(report, baseline),
                                energy_overhead(report, baseline), report});
        }
        return out;
    }

    throw ConfigError("unknown sweep axis: " + axis +
                      " (expected duration|policy|checkpoint_interval)");
}

std::string report_to_json_text(const SimReport& report) {
    return report.to_json().dump(2) + "\n";
}

std::string report_to_csv_text(const SimReport& report) {
    return SimReport::csv_header() + "\n" + report.csv_row() + "\n";
}

std::string sweep_to_csv_text(const SweepResult& sweep) {
    std::ostringstream out;
    out << "axis,value,slowdown,energy_overhead," << SimReport::csv_header()
        << "\n";
    for (const auto& row : sweep.rows) {
        out << row.axis << ',' << row.value << ','
            << format_double(row.slowdown) << ','
            << format_double(row.energy_overhead) << ',' << row.report.csv_row()
            << "\n";
    }
    return out.str();
}

} // namespace sttsim
