#include "sttsim/metrics.hpp"

#include <sstream>
#include <stdexcept>

namespace sttsim {

namespace {

const char* class_name(AttackClass c) {
    switch (c) {
        case AttackClass::none: return "none";
        case AttackClass::gradual: return "gradual";
        case AttackClass::sudden: return "sudden";
    }
    return "?";
}

AttackClass class_from(const std::string& s) {
    if (s == "none") return AttackClass::none;
    if (s == "gradual") return AttackClass::gradual;
    if (s == "sudden") return AttackClass::sudden;
    throw std::invalid_argument("bad attack classification: " + s);
}

AttackProfile profile_from(const std::string& s) {
    if (s == "ramp") return AttackProfile::ramp;
    if (s == "step") return AttackProfile::step;
    throw std::invalid_argument("bad attack profile: " + s);
}

} // namespace

EnergyBreakdown compute_energy(const EnergyCounts& counts,
                               const RunConfig::Energy& prices) {
    EnergyBreakdown e;
    e.l1 = static_cast<double>(counts.l1_access) * prices.l1_access;
    e.l2 = static_cast<double>(counts.l2_access) * prices.l2_access;
    e.llc_read = static_cast<double>(counts.llc_read) * prices.llc_read;
    e.llc_write = static_cast<double>(counts.llc_write) * prices.llc_write;
    e.mem = static_cast<double>(counts.mem_access) * prices.mem_access;
    e.buffer = static_cast<double>(counts.buffer_op) * prices.buffer_op;
    e.checkpoint =
        static_cast<double>(counts.checkpoint) * prices.checkpoint_overhead;
    e.total = e.l1 + e.l2 + e.llc_read + e.llc_write + e.mem + e.buffer +
              e.checkpoint;
    return e;
}

nlohmann::ordered_json SimReport::to_json() const {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["policy"] = policy;
    j["trace_hash"] = trace_hash;
    j["geometry_hash"] = geometry_hash;

    nlohmann::ordered_json eps = nlohmann::ordered_json::array();
    for (const auto& ep : attack) {
        nlohmann::ordered_json e;
        e["start"] = ep.start_cycle;
        e["end"] = ep.end_cycle;
        e["profile"] = to_string(ep.profile);
        e["peak"] = ep.peak_strength;
        e["classification"] = class_name(ep.classification);
        e["detection_lead"] = ep.detection_lead;
        eps.push_back(e);
    }
    j["attack"]["episodes"] = eps;

    auto& jc = j["cycles"];
    jc["total"] = cycles.total;
    jc["access"] = cycles.access;
    jc["reexec_access"] = cycles.reexec_access;
    jc["stall"] = cycles.stall;
    jc["flush"] = cycles.flush;
    jc["invalidate"] = cycles.invalidate;
    jc["checkpoint"] = cycles.checkpoint;
    jc["rollback"] = cycles.rollback;

    auto& je = j["events"];
    je["useful_requests"] = events.useful_requests;
    je["requests_executed"] = events.requests_executed;
    je["re_executed_requests"] = events.re_executed_requests;
    je["l1_hits"] = events.l1_hits;
    je["l1_misses"] = events.l1_misses;
    je["l2_hits"] = events.l2_hits;
    je["l2_misses"] = events.l2_misses;
    je["llc_hits"] = events.llc_hits;
    je["llc_misses"] = events.llc_misses;
    je["llc_forced_misses"] = events.llc_forced_misses;
    je["llc_snoop_hits"] = events.llc_snoop_hits;
    je["mem_reads"] = events.mem_reads;
    je["mem_writes"] = events.mem_writes;
    je["flushes"] = events.flushes;
    je["invalidations"] = events.invalidations;
    je["checkpoints"] = events.checkpoints;
    je["forced_checkpoints"] = events.forced_checkpoints;
    je["rollbacks"] = events.rollbacks;
    je["exclusivity_scans"] = events.exclusivity_scans;
    je["line_flips"] = events.line_flips;
    je["detected_attacks"] = events.detected_attacks;
    je["restart_required"] = events.restart_required;

    auto& jn = j["energy"];
    auto& jcounts = jn["counts"];
    jcounts["l1_access"] = energy_events.l1_access;
    jcounts["l2_access"] = energy_events.l2_access;
    jcounts["llc_read"] = energy_events.llc_read;
    jcounts["llc_write"] = energy_events.llc_write;
    jcounts["mem_access"] = energy_events.mem_access;
    jcounts["buffer_op"] = energy_events.buffer_op;
    jcounts["checkpoint"] = energy_events.checkpoint;
    auto& jby = jn["by_component"];
    jby["l1"] = energy.l1;
    jby["l2"] = energy.l2;
    jby["llc_read"] = energy.llc_read;
    jby["llc_write"] = energy.llc_write;
    jby["mem"] = energy.mem;
    jby["buffer"] = energy.buffer;
    jby["checkpoint"] = energy.checkpoint;
    jn["total"] = energy.total;

    j["corrupted_reads"] = corrupted_reads;
    j["config"] = config_text;
    return j;
}

SimReport SimReport::from_json(const nlohmann::ordered_json& j) {
    SimReport r;
    r.config_hash = j.at("config_hash").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.policy = j.at("policy").get<std::string>();
    r.trace_hash = j.at("trace_hash").get<std::uint64_t>();
    r.geometry_hash = j.at("geometry_hash").get<std::uint64_t>();

    for (const auto& e : j.at("attack").at("episodes")) {
        EpisodeReport ep;
        ep.start_cycle = e.at("start").get<Cycle>();
        ep.end_cycle = e.at("end").get<Cycle>();
        ep.profile = profile_from(e.at("profile").get<std::string>());
        ep.peak_strength = e.at("peak").get<double>();
        ep.classification =
            class_from(e.at("classification").get<std::string>());
        ep.detection_lead = e.at("detection_lead").get<std::int64_t>();
        r.attack.push_back(ep);
    }

    const auto& jc = j.at("cycles");
    r.cycles.total = jc.at("total").get<Cycle>();
    r.cycles.access = jc.at("access").get<Cycle>();
    r.cycles.reexec_access = jc.at("reexec_access").get<Cycle>();
    r.cycles.stall = jc.at("stall").get<Cycle>();
    r.cycles.flush = jc.at("flush").get<Cycle>();
    r.cycles.invalidate = jc.at("invalidate").get<Cycle>();
    r.cycles.checkpoint = jc.at("checkpoint").get<Cycle>();
    r.cycles.rollback = jc.at("rollback").get<Cycle>();

    const auto& je = j.at("events");
    r.events.useful_requests = je.at("useful_requests").get<std::uint64_t>();
    r.events.requests_executed =
        je.at("requests_executed").get<std::uint64_t>();
    r.events.re_executed_requests =
        je.at("re_executed_requests").get<std::uint64_t>();
    r.events.l1_hits = je.at("l1_hits").get<std::uint64_t>();
    r.events.l1_misses = je.at("l1_misses").get<std::uint64_t>();
    r.events.l2_hits = je.at("l2_hits").get<std::uint64_t>();
    r.events.l2_misses = je.at("l2_misses").get<std::uint64_t>();
    r.events.llc_hits = je.at("llc_hits").get<std::uint64_t>();
    r.events.llc_misses = je.at("llc_misses").get<std::uint64_t>();
    r.events.llc_forced_misses =
        je.at("llc_forced_misses").get<std::uint64_t>();
    r.events.llc_snoop_hits = je.at("llc_snoop_hits").get<std::uint64_t>();
    r.events.mem_reads = je.at("mem_reads").get<std::uint64_t>();
    r.events.mem_writes = je.at("mem_writes").get<std::uint64_t>();
    r.events.flushes = je.at("flushes").get<std::uint64_t>();
    r.events.invalidations = je.at("invalidations").get<std::uint64_t>();
    r.events.checkpoints = je.at("checkpoints").get<std::uint64_t>();
    r.events.forced_checkpoints =
        je.at("forced_checkpoints").get<std::uint64_t>();
    r.events.rollbacks = je.at("rollbacks").get<std::uint64_t>();
    r.events.exclusivity_scans =
        je.at("exclusivity_scans").get<std::uint64_t>();
    r.events.line_flips = je.at("line_flips").get<std::uint64_t>();
    r.events.detected_attacks =
        je.at("detected_attacks").get<std::uint64_t>();
    r.events.restart_required = je.at("restart_required").get<bool>();

    const auto& jn = j.at("energy");
    const auto& jcounts = jn.at("counts");
    r.energy_events.l1_access = jcounts.at("l1_access").get<std::uint64_t>();
    r.energy_events.l2_access = jcounts.at("l2_access").get<std::uint64_t>();
    r.energy_events.llc_read = jcounts.at("llc_read").get<std::uint64_t>();
    r.energy_events.llc_write = jcounts.at("llc_write").get<std::uint64_t>();
    r.energy_events.mem_access = jcounts.at("mem_access").get<std::uint64_t>();
    r.energy_events.buffer_op = jcounts.at("buffer_op").get<std::uint64_t>();
    r.energy_events.checkpoint = jcounts.at("checkpoint").get<std::uint64_t>();
    const auto& jby = jn.at("by_component");
    r.energy.l1 = jby.at("l1").get<double>();
    r.energy.l2 = jby.at("l2").get<double>();
    r.energy.llc_read = jby.at("llc_read").get<double>();
    r.energy.llc_write = jby.at("llc_write").get<double>();
    r.energy.mem = jby.at("mem").get<double>();
    r.energy.buffer = jby.at("buffer").get<double>();
    r.energy.checkpoint = jby.at("checkpoint").get<double>();
    r.energy.total = jn.at("total").get<double>();

    r.corrupted_reads = j.at("corrupted_reads").get<std::uint64_t>();
    r.config_text = j.at("config").get<std::string>();
    return r;
}

std::string SimReport::csv_header() {
    return "policy,seed,config_hash,trace_hash,geometry_hash,"
           "useful_requests,requests_executed,re_executed_requests,"
           "total_cycles,access_cycles,reexec_cycles,stall_cycles,"
           "flush_cycles,invalidate_cycles,checkpoint_cycles,rollback_cycles,"
           "l1_hits,l1_misses,l2_hits,l2_misses,llc_hits,llc_misses,"
           "llc_forced_misses,llc_snoop_hits,mem_reads,mem_writes,"
           "flushes,invalidations,checkpoints,forced_checkpoints,rollbacks,"
           "exclusivity_scans,line_flips,detected_attacks,restart_required,"
           "corrupted_reads,energy_total,energy_l1,energy_l2,"
           "energy_llc_read,energy_llc_write,energy_mem,energy_buffer,"
           "energy_checkpoint";
}

std::string SimReport::csv_row() const {
    std::ostringstream out;
    out << policy << ',' << seed << ',' << config_hash << ',' << trace_hash
        << ',' << geometry_hash << ',' << events.useful_requests << ','
        << events.requests_executed << ',' << events.re_executed_requests
        << ',' << cycles.total << ',' << cycles.access << ','
        << cycles.reexec_access << ',' << cycles.stall << ',' << cycles.flush
        << ',' << cycles.invalidate << ',' << cycles.checkpoint << ','
        << cycles.rollback << ',' << events.l1_hits << ',' << events.l1_misses
        << ',' << events.l2_hits << ',' << events.l2_misses << ','
        << events.llc_hits << ',' << events.llc_misses << ','
        << events.llc_forced_misses << ',' << events.llc_snoop_hits << ','
        << events.mem_reads << ',' << events.mem_writes << ','
        << events.flushes << ',' << events.invalidations << ','
        << events.checkpoints << ',' << events.forced_checkpoints << ','
        << events.rollbacks << ',' << events.exclusivity_scans << ','
        << events.line_flips << ',' << events.detected_attacks << ','
        << (events.restart_required ? 1 : 0) << ',' << corrupted_reads << ','
        << format_double(energy.total) << ',' << format_double(energy.l1)
        << ',' << format_double(energy.l2) << ','
        << format_double(energy.llc_read) << ','
        << format_double(energy.llc_write) << ',' << format_double(energy.mem)
        << ',' << format_double(energy.buffer) << ','
        << format_double(energy.checkpoint);
    return out.str();
}

double normalized_slowdown(const SimReport& run, const SimReport& baseline) {
    if (run.trace_hash != baseline.trace_hash) {
        throw std::invalid_argument(
            "normalized_slowdown: reports ran different traces");
    }
    if (run.geometry_hash != baseline.geometry_hash) {
        throw std::invalid_argument(
            "normalized_slowdown: reports ran different geometries");
    }
    if (baseline.cycles.total == 0) {
        throw std::invalid_argument("normalized_slowdown: baseline has zero cycles");
    }
    return static_cast<double>(run.cycles.total) /
           static_cast<double>(baseline.cycles.total);
}

double energy_overhead(const SimReport& run, const SimReport& baseline) {
    if (run.trace_hash != baseline.trace_hash) {
        throw std::invalid_argument(
            "energy_overhead: reports ran different traces");
    }
    if (run.geometry_hash != baseline.geometry_hash) {
        throw std::invalid_argument(
            "energy_overhead: reports ran different geometries");
    }
    if (!(baseline.energy.total > 0.0)) {
        throw std::invalid_argument("energy_overhead: baseline has zero energy");
    }
    return (run.energy.total - baseline.energy.total) / baseline.energy.total;
}

} // namespace sttsim
