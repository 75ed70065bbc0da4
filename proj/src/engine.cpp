#include "sttsim/engine.hpp"

#include <limits>
#include <sstream>
#include <unordered_set>

#include "sttsim/physics.hpp"
#include "sttsim/rng.hpp"

namespace sttsim {

namespace {

constexpr Cycle kNever = std::numeric_limits<Cycle>::max();
// Poisoned versions live in the top half of the version space.
constexpr Version kPoisonBit = 0x8000000000000000ULL;
// Expected flips below this are unobservable at simulated scales; skipping
// the per-line draws there is a pure performance cutoff.
constexpr double kNegligibleFlip = 1e-18;

const RunConfig& require_valid(const RunConfig& cfg) {
    cfg.validate();
    return cfg;
}

} // namespace

const char* to_string(ServicedBy s) {
    switch (s) {
        case ServicedBy::l1: return "l1";
        case ServicedBy::l2: return "l2";
        case ServicedBy::llc: return "llc";
        case ServicedBy::memory: return "memory";
    }
    return "?";
}

CacheGeometry Engine::level_geometry(const RunConfig::Level& level,
                                     std::uint32_t line_size) {
    return CacheGeometry{level.size, level.ways, line_size};
}

Engine::Engine(const RunConfig& cfg, std::vector<MemoryRequest> trace)
    : cfg_(require_valid(cfg)),
      trace_(std::move(trace)),
      trace_hash_(trace_digest(trace_)),
      line_mask_(cfg_.line_size - 1),
      l1_(level_geometry(cfg_.l1, cfg_.line_size)),
      l2_(level_geometry(cfg_.l2, cfg_.line_size)),
      buffer_(cfg_.llc.enabled
                  ? std::size_t(cfg_.llc.banks) * cfg_.llc.wb_entries
                  : 1),
      controller_(cfg_.policy) {
    if (cfg_.llc.enabled) {
        llc_.emplace(CacheGeometry{cfg_.llc.size, cfg_.llc.ways, cfg_.line_size});
    }
    checkpoint_interval_ = cfg_.checkpoint.interval;
    checkpointing_ = cfg_.policy == PolicyKind::checkpoint_bypass;
    if (checkpointing_) {
        buffer_.set_masked(true);
        next_checkpoint_ = checkpoint_interval_;
    } else {
        next_checkpoint_ = kNever;
    }
    checkpoint_ = Checkpoint{0, 0, golden_}; // trace start is a free checkpoint
}

SimReport Engine::run() {
    ev_.useful_requests = trace_.size();
    for (;;) {
        pump_events();
        if (halted_) {
            advance_while_halted();
            continue;
        }
        if (cursor_ >= trace_.size()) break;
        const MemoryRequest req = trace_[cursor_];
        const bool reexec = cursor_ < replay_watermark_;
        const StepResult step = execute(req);
        (reexec ? cycles_.reexec_access : cycles_.access) +=
            step.outcome.latency;
        now_ += step.outcome.latency;
        ++cursor_;
        if (forced_checkpoint_pending_) take_checkpoint(true);
    }
    finalize();
    return build_report();
}

Engine::StepResult Engine::execute(const MemoryRequest& req) {
    const Addr line = line_of(req.address);
    const Version expected = req.kind == MemoryRequest::Kind::write
                                 ? golden_.apply_write(line)
                                 : golden_.read(line);
    const AccessOutcome outcome = access(req, expected);
    const bool corrupted = verify_outcome(outcome, expected);
    ++ev_.requests_executed;
    maybe_scan_exclusivity();
    return StepResult{outcome, expected, corrupted};
}

AccessOutcome Engine::access(const MemoryRequest& req, Version write_version) {
    if (halted_) throw HaltedError("access while halted by stall mitigation");
    const Addr line = line_of(req.address);
    return req.kind == MemoryRequest::Kind::read
               ? read_path(line)
               : write_path(line, write_version);
}

AccessOutcome Engine::bypass_access(const MemoryRequest& req,
                                    Version write_version) {
    if (!bypass_) throw ProtocolError("bypass_access while BP deasserted");
    return access(req, write_version);
}

bool Engine::verify_outcome(const AccessOutcome& outcome, Version expected) {
    const bool corrupted =
        outcome.corrupted || outcome.returned_version != expected;
    if (corrupted) ++pending_corrupted_;
    return corrupted;
}

Cycle Engine::miss_tail() const {
    return (cfg_.lookaside ? 0 : cfg_.llc.read_latency) + cfg_.mem_latency;
}

bool Engine::track_volatile() const {
    return cfg_.policy == PolicyKind::checkpoint_bypass && checkpointing_;
}

AccessOutcome Engine::read_path(Addr line) {
    ++en_.l1_access;
    if (const auto hit = l1_.read(line)) {
        ++ev_.l1_hits;
        return {ServicedBy::l1, cfg_.l1.latency, hit->version, hit->poisoned};
    }
    ++ev_.l1_misses;
    ++en_.l2_access;
    const Cycle base = cfg_.l1.latency + cfg_.l2.latency;
    if (const auto hit = l2_.read(line)) {
        ++ev_.l2_hits;
        return {ServicedBy::l2, base, hit->version, hit->poisoned};
    }
    ++ev_.l2_misses;

    if (!llc_) {
        const Version v = memory_read(line);
        fill_l1(line, v);
        return {ServicedBy::memory, base + cfg_.mem_latency, v, false};
    }

    if (bypass_) {
        ++en_.llc_read; // the probe happens; the controller reports a miss
        if (llc_->lookup(line)) ++ev_.llc_forced_misses;
        ++ev_.llc_misses;
        const Version v = memory_read(line);
        if (cfg_.bypass_fills) ++en_.llc_write; // refill burned, not installed
        fill_l1(line, v);
        return {ServicedBy::memory, base + miss_tail(), v, false};
    }

    ++en_.llc_read;
    if (const CacheLine* hit = llc_->lookup(line)) {
        ++ev_.llc_hits;
        const CacheLine copy = *hit;
        // exclusive promotion: the LLC copy moves up to L2
        llc_->invalidate(line);
        insert_l2(line, copy.version, copy.dirty, copy.poisoned,
                  copy.volatile_flag);
        return {ServicedBy::llc, base + cfg_.llc.read_latency, copy.version,
                copy.poisoned};
    }
    if (const auto snooped = buffer_.snoop(line)) {
        ++en_.buffer_op;
        ++ev_.llc_hits;
        ++ev_.llc_snoop_hits;
        return {ServicedBy::llc, base + cfg_.llc.read_latency, *snooped, false};
    }
    ++ev_.llc_misses;
    const Version v = memory_read(line);
    fill_l1(line, v);
    return {ServicedBy::memory, base + miss_tail(), v, false};
}

AccessOutcome Engine::write_path(Addr line, Version version) {
    ++en_.l1_access;
    if (l1_.write(line, version, track_volatile())) {
        ++ev_.l1_hits;
        return {ServicedBy::l1, cfg_.l1.latency, version, false};
    }
    ++ev_.l1_misses;
    ++en_.l2_access;
    const Cycle base = cfg_.l1.latency + cfg_.l2.latency;
    if (l2_.write(line, version, track_volatile())) {
        ++ev_.l2_hits;
        return {ServicedBy::l2, base, version, false};
    }
    ++ev_.l2_misses;

    if (!llc_) {
        commit_to_memory({line, version});
        return {ServicedBy::memory, base + cfg_.mem_latency, version, false};
    }

    if (bypass_) {
        ++en_.llc_read; // tag check; a resident line just goes stale
        if (llc_->lookup(line)) ++ev_.llc_forced_misses;
        ++ev_.llc_misses;
        commit_writeback({line, version});
        return {ServicedBy::memory, base + miss_tail(), version, false};
    }

    ++en_.llc_read;
    if (llc_->write(line, version, track_volatile())) {
        ++en_.llc_write;
        ++ev_.llc_hits;
        return {ServicedBy::llc, base + cfg_.llc.write_latency, version, false};
    }
    ++ev_.llc_misses;
    // write-no-allocate: the line is not cached on a full miss
    commit_writeback({line, version});
    return {ServicedBy::memory, base + miss_tail(), version, false};
}

void Engine::fill_l1(Addr line, Version version) {
    ++en_.l1_access;
    if (const auto victim = l1_.insert(line, version, false)) {
        insert_l2(victim->address, victim->version, victim->dirty,
                  victim->poisoned, victim->volatile_flag);
    }
}

void Engine::insert_l2(Addr line, Version version, bool dirty, bool poisoned,
                       bool volatile_flag) {
    ++en_.l2_access;
    if (const auto victim =
            l2_.insert(line, version, dirty, poisoned, volatile_flag)) {
        route_l2_eviction(*victim);
    }
}

void Engine::route_l2_eviction(const EvictedLine& victim) {
    if (!llc_ || bypass_) {
        // no live LLC below: dirty data goes straight home, clean is dropped
        if (victim.dirty) commit_to_memory({victim.address, victim.version});
        return;
    }
    ++en_.llc_write;
    if (const auto evicted =
            llc_->insert(victim.address, victim.version, victim.dirty,
                         victim.poisoned, victim.volatile_flag)) {
        route_llc_eviction(*evicted);
    }
}

void Engine::route_llc_eviction(const EvictedLine& victim) {
    if (!victim.dirty) return;
    if (cfg_.checkpoint.volatile_bits && victim.volatile_flag &&
        track_volatile()) {
        // speculative data may not leave the hierarchy before a commit
        overflow_.push_back({victim.address, victim.version});
        forced_checkpoint_pending_ = true;
        return;
    }
    commit_writeback({victim.address, victim.version});
}

void Engine::commit_writeback(const WriteBackEntry& entry) {
    if (buffer_.masked()) {
        if (buffer_.push(entry)) {
            ++en_.buffer_op;
        } else {
            overflow_.push_back(entry);
            forced_checkpoint_pending_ = true;
        }
        return;
    }
    en_.buffer_op += 2; // push + immediate drain
    commit_to_memory(entry);
}

void Engine::commit_to_memory(const WriteBackEntry& entry) {
    memory_[entry.address] = entry.version;
    ++ev_.mem_writes;
    ++en_.mem_access;
}

Version Engine::memory_read(Addr line) {
    ++ev_.mem_reads;
    ++en_.mem_access;
    const auto it = memory_.find(line);
    return it == memory_.end() ? 0 : it->second;
}

void Engine::pump_events() {
    for (;;) {
        const Cycle boundary = next_boundary_;
        const Cycle ckpt = checkpointing_ ? next_checkpoint_ : kNever;
        if (boundary > now_ && ckpt > now_) break;
        if (boundary <= ckpt) {
            process_boundary(boundary);
            next_boundary_ = boundary + cfg_.sensor.sample_interval;
        } else {
            take_checkpoint(false);
        }
    }
}

void Engine::process_boundary(Cycle boundary) {
    const double strength = cfg_.attack.strength_at(boundary);
    // corruption first: a step can poison lines before the sensor reacts
    if (llc_ && strength > 0.0 && llc_->unpoisoned_valid_count() > 0) {
        const double dt =
            static_cast<double>(cfg_.sensor.sample_interval) / cfg_.clock_hz;
        const double p = flip_probability(cfg_.mtj, strength, dt);
        if (p >= kNegligibleFlip) {
            ev_.line_flips += llc_->apply_corruption(p, cfg_.seed, boundary);
        }
    }
    controller_.on_sensor(*this, sample_sensor(cfg_.sensor, cfg_.attack, boundary));
}

void Engine::advance_while_halted() {
    Cycle target = next_boundary_;
    const auto idx = cfg_.attack.episode_index_at(target);
    const bool asserted =
        cfg_.attack.strength_at(target) >= cfg_.sensor.sensor_threshold;
    if (idx && asserted && (!llc_ || llc_->valid_count() == 0)) {
        // Episode strength is non-decreasing, so every sample through the
        // episode end stays asserted (no controller edges), and corruption
        // cannot act on an empty LLC. Jump straight past the episode.
        const Cycle after = cfg_.attack.episodes[*idx].end_cycle + 1;
        const Cycle interval = cfg_.sensor.sample_interval;
        const Cycle jump = (after + interval - 1) / interval * interval;
        if (jump > target) target = jump;
        next_boundary_ = target;
    }
    cycles_.stall += target - now_;
    now_ = target;
}

void Engine::flush_llc() {
    if (!llc_) throw ProtocolError("flush_llc without an LLC");
    log(ActionType::flush);
    ++ev_.flushes;
    Cycle cost = 0;
    for (const auto& entry : llc_->flush()) {
        ++en_.llc_read;
        commit_writeback(entry);
        cost += cfg_.llc.read_latency + cfg_.mem_latency;
    }
    cycles_.flush += cost;
    now_ += cost;
}

void Engine::invalidate_llc() {
    if (!llc_) throw ProtocolError("invalidate_llc without an LLC");
    log(ActionType::invalidate);
    ++ev_.invalidations;
    llc_->invalidate_all();
    cycles_.invalidate += cfg_.llc.invalidate_cost;
    now_ += cfg_.llc.invalidate_cost;
}

void Engine::halt() {
    if (halted_) throw ProtocolError("halt while already halted");
    halted_ = true;
    log(ActionType::halt);
}

void Engine::resume() {
    if (!halted_) throw ProtocolError("resume while not halted");
    halted_ = false;
    log(ActionType::resume);
}

void Engine::set_bypass(bool active) {
    if (!llc_) throw ProtocolError("bypass without an LLC");
    if (active == bypass_) throw ProtocolError("redundant BP transition");
    bypass_ = active;
    log(active ? ActionType::bp_assert : ActionType::bp_deassert);
}

void Engine::note_attack_detected(AttackClass cls) {
    ++ev_.detected_attacks;
    if (cfg_.checkpoint.adaptive && !adapted_) {
        checkpoint_interval_ = std::max<Cycle>(1, checkpoint_interval_ / 2);
        adapted_ = true;
    }
    if (cfg_.policy == PolicyKind::stall && cls == AttackClass::sudden &&
        !ev_.restart_required) {
        // volatile state may be gone before the flush lands; software must
        // restart after the stall completes
        ev_.restart_required = true;
        log(ActionType::restart_flag);
    }
}

void Engine::take_checkpoint(bool forced) {
    if (bypass_) throw ProtocolError("checkpoint during an active attack");
    Cycle cost = 0;
    buffer_.set_masked(false);
    for (const auto& entry : buffer_.drain()) {
        ++en_.buffer_op;
        commit_to_memory(entry);
        cost += cfg_.mem_latency;
    }
    for (const auto& entry : overflow_) {
        commit_to_memory(entry);
        cost += cfg_.mem_latency;
    }
    overflow_.clear();
    forced_checkpoint_pending_ = false;

    for (const auto& entry : l1_.write_back_dirty()) {
        ++en_.l1_access;
        commit_to_memory(entry);
        cost += cfg_.l1.latency + cfg_.mem_latency;
    }
    for (const auto& entry : l2_.write_back_dirty()) {
        ++en_.l2_access;
        commit_to_memory(entry);
        cost += cfg_.l2.latency + cfg_.mem_latency;
    }
    if (llc_) {
        for (const auto& entry : llc_->write_back_dirty()) {
            ++en_.llc_read;
            commit_to_memory(entry);
            cost += cfg_.llc.read_latency + cfg_.mem_latency;
        }
    }
    l1_.clear_volatile_flags();
    l2_.clear_volatile_flags();
    if (llc_) llc_->clear_volatile_flags();

    cost += cfg_.checkpoint.register_save_cost;
    ++en_.checkpoint;
    cycles_.checkpoint += cost;
    now_ += cost;

    checkpoint_ = Checkpoint{cursor_, now_, golden_};
    verify_commit_state(golden_);
    committed_corrupted_ += pending_corrupted_;
    pending_corrupted_ = 0;

    if (cfg_.policy == PolicyKind::checkpoint_bypass && checkpointing_) {
        buffer_.set_masked(true);
    }
    next_checkpoint_ = now_ + checkpoint_interval_;
    ++ev_.checkpoints;
    if (forced) {
        ++ev_.forced_checkpoints;
        log(ActionType::forced_checkpoint);
    } else {
        log(ActionType::checkpoint);
    }
}

void Engine::rollback() {
    if (cfg_.policy != PolicyKind::checkpoint_bypass) {
        throw ProtocolError("rollback requires the checkpoint_bypass policy");
    }
    // nothing may have committed since the checkpoint was cut
    verify_commit_state(checkpoint_.golden);
    ev_.re_executed_requests += cursor_ - checkpoint_.trace_index;
    if (cursor_ > replay_watermark_) replay_watermark_ = cursor_;
    cursor_ = checkpoint_.trace_index;
    golden_ = checkpoint_.golden;
    l1_.invalidate_all();
    l2_.invalidate_all();
    if (llc_) llc_->invalidate_all();
    buffer_.discard();
    buffer_.set_masked(false); // attack regime: commits go straight through
    checkpointing_ = false;
    pending_corrupted_ = 0; // squashed epoch never architecturally happened
    cycles_.rollback += cfg_.checkpoint.register_save_cost;
    now_ += cfg_.checkpoint.register_save_cost;
    ++en_.checkpoint; // register restore mirrors the save cost
    ++ev_.rollbacks;
    log(ActionType::rollback);
    if (rollback_observer_) rollback_observer_(*this);
}

void Engine::exit_attack_checkpoint() {
    checkpointing_ = true;
    take_checkpoint(false);
}

void Engine::maybe_scan_exclusivity() {
    if (cfg_.exclusivity_check_interval == 0) return;
    if (++accesses_since_scan_ < cfg_.exclusivity_check_interval) return;
    accesses_since_scan_ = 0;
    check_exclusivity();
    ++ev_.exclusivity_scans;
}

void Engine::check_exclusivity() {
    std::unordered_set<Addr> seen;
    const auto scan = [&seen](const CacheLevel& level, const char* name) {
        for (const Addr addr : level.resident_addresses()) {
            if (!seen.insert(addr).second) {
                std::ostringstream msg;
                msg << "exclusivity violated: line 0x" << std::hex << addr
                    << " duplicated at " << name;
                throw InvariantViolation(msg.str());
            }
        }
    };
    scan(l1_, "l1");
    scan(l2_, "l2");
    if (llc_) scan(*llc_, "llc");
}

void Engine::verify_commit_state(const GoldenMemory& golden) const {
    if (memory_.size() != golden.versions().size()) {
        throw InvariantViolation(
            "committed memory and golden state cover different lines");
    }
    for (const auto& [addr, version] : memory_) {
        const auto it = golden.versions().find(addr);
        if (it == golden.versions().end()) {
            throw InvariantViolation("committed line missing from golden state");
        }
        // poison-scrambled versions are the honest residue of an undetected
        // flip reaching memory; anything else must match golden exactly
        if (version != it->second && (version & kPoisonBit) == 0) {
            throw InvariantViolation("committed version diverges from golden");
        }
    }
}

void Engine::finalize() {
    if (cfg_.policy == PolicyKind::checkpoint_bypass && checkpointing_ &&
        !bypass_) {
        take_checkpoint(false); // commit the tail epoch at normal cost
    } else {
        buffer_.set_masked(false);
        for (const auto& entry : buffer_.drain()) {
            ++en_.buffer_op;
            commit_to_memory(entry);
        }
    }
    committed_corrupted_ += pending_corrupted_;
    pending_corrupted_ = 0;
    cycles_.total = cycles_.access + cycles_.reexec_access + cycles_.stall +
                    cycles_.flush + cycles_.invalidate + cycles_.checkpoint +
                    cycles_.rollback;
    if (cycles_.total != now_) {
        throw InvariantViolation("cycle bucket accounting diverged from clock");
    }
}

SimReport Engine::build_report() const {
    SimReport r;
    r.policy = to_string(cfg_.policy);
    r.seed = cfg_.seed;
    r.config_hash = cfg_.config_hash();
    r.trace_hash = trace_hash_;
    r.geometry_hash = cfg_.geometry_hash();
    r.config_text = cfg_.canonical_text();
    for (std::size_t i = 0; i < cfg_.attack.episodes.size(); ++i) {
        const AttackEpisode& ep = cfg_.attack.episodes[i];
        EpisodeReport er;
        er.start_cycle = ep.start_cycle;
        er.end_cycle = ep.end_cycle;
        er.profile = ep.profile;
        er.peak_strength = ep.peak_strength;
        if (const auto first = first_asserted_sample(cfg_.sensor, ep)) {
            const SensorReading at =
                sample_sensor(cfg_.sensor, cfg_.attack, *first);
            er.classification = at.classification;
        }
        er.detection_lead = detection_lead(cfg_.sensor, cfg_.attack, i);
        r.attack.push_back(er);
    }
    r.cycles = cycles_;
    r.events = ev_;
    r.energy_events = en_;
    r.energy = compute_energy(en_, cfg_.energy);
    r.corrupted_reads = committed_corrupted_;
    return r;
}

} // namespace sttsim
