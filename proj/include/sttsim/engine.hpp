#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sttsim/attack.hpp"
#include "sttsim/cache.hpp"
#include "sttsim/config.hpp"
#include "sttsim/metrics.hpp"
#include "sttsim/mitigation.hpp"
#include "sttsim/trace.hpp"
#include "sttsim/types.hpp"

// Trace-driven simulator of the exclusive L1/L2/LLC hierarchy under attack.
// Every write is tagged with a monotonically increasing golden version; a
// read is corrupted iff the serviced line is poisoned or the returned
// version disagrees with the golden expectation. Committed memory state
// only changes through write-backs, so rollback = restore golden snapshot +
// drop all cache/buffer state.

namespace sttsim {

enum class ServicedBy { l1, l2, llc, memory };
const char* to_string(ServicedBy s);

struct AccessOutcome {
    ServicedBy serviced_by = ServicedBy::memory;
    Cycle latency = 0;
    Version returned_version = 0;
    bool corrupted = false; // poisoned line serviced (cache levels only)
};

class GoldenMemory {
  public:
    Version apply_write(Addr line) {
        const Version v = next_version_++;
        versions_[line] = v;
        return v;
    }
    Version read(Addr line) const {
        const auto it = versions_.find(line);
        return it == versions_.end() ? 0 : it->second;
    }
    Version next_version() const { return next_version_; }
    const std::unordered_map<Addr, Version>& versions() const {
        return versions_;
    }
    bool operator==(const GoldenMemory& other) const {
        return next_version_ == other.next_version_ &&
               versions_ == other.versions_;
    }

  private:
    std::unordered_map<Addr, Version> versions_;
    Version next_version_ = 1; // version 0 = never written
};

struct Checkpoint {
    std::uint64_t trace_index = 0;
    Cycle cycle = 0;
    GoldenMemory golden; // equals committed memory at save time
};

class Engine {
  public:
    Engine(const RunConfig& cfg, std::vector<MemoryRequest> trace);

    // Full simulation: replays the trace with sensor sampling, corruption,
    // mitigation and checkpoint scheduling, then finalizes the report.
    SimReport run();

    struct StepResult {
        AccessOutcome outcome;
        Version expected = 0;
        bool corrupted_read = false;
    };
    // Golden apply + access + verify for one request. Advances stats but
    // not the clock (run() owns time. Direct callers drive their own).
    StepResult execute(const MemoryRequest& req);

    // One hierarchy access. Writes carry the version to store (the golden
    // assignment); reads ignore it. Throws HaltedError while halted.
    AccessOutcome access(const MemoryRequest& req, Version write_version = 0);

    // Same as access, but legal only while BP is asserted.
    AccessOutcome bypass_access(const MemoryRequest& req,
                                Version write_version = 0);

    // True when the outcome disagrees with the golden expectation; counts
    // toward the pending corrupted-read tally.
    bool verify_outcome(const AccessOutcome& outcome, Version expected);

    // Mitigation building blocks (also exercised directly by tests).
    void flush_llc();      // write back all dirty LLC lines, invalidate all
    void invalidate_llc(); // drop all LLC lines, fixed cost, no write-back
    void halt();
    void resume();
    void set_bypass(bool active);
    void take_checkpoint(bool forced);
    void rollback(); // to the last checkpoint; throws unless checkpoint_bypass
    void note_attack_detected(AttackClass cls);
    void exit_attack_checkpoint(); // re-enable checkpointing + checkpoint now

    // state access
    const RunConfig& config() const { return cfg_; }
    Cycle now() const { return now_; }
    std::uint64_t cursor() const { return cursor_; }
    bool halted() const { return halted_; }
    bool bypass_active() const { return bypass_; }
    bool checkpointing_enabled() const { return checkpointing_; }
    CacheLevel& l1() { return l1_; }
    CacheLevel& l2() { return l2_; }
    CacheLevel& llc() { return *llc_; }
    bool llc_enabled() const { return llc_.has_value(); }
    WriteBuffer& write_buffer() { return buffer_; }
    GoldenMemory& golden() { return golden_; }
    const std::unordered_map<Addr, Version>& committed_memory() const {
        return memory_;
    }
    const Checkpoint& last_checkpoint() const { return checkpoint_; }
    const CycleBuckets& cycle_buckets() const { return cycles_; }
    const EventCounts& event_counts() const { return ev_; }
    const EnergyCounts& energy_counts() const { return en_; }
    const std::vector<Action>& action_log() const { return log_; }
    const MitigationController& controller() const { return controller_; }
    std::uint64_t pending_corrupted_reads() const { return pending_corrupted_; }

    // Invoked after every completed rollback; tests hang oracles off this.
    void set_rollback_observer(std::function<void(Engine&)> fn) {
        rollback_observer_ = std::move(fn);
    }

    // Throws InvariantViolation when an address is resident in two levels.
    void check_exclusivity();

    Addr line_of(Addr address) const { return address & ~line_mask_; }

  private:
    friend class MitigationController;

    static CacheGeometry level_geometry(const RunConfig::Level& level,
                                        std::uint32_t line_size);

    void pump_events();
    void process_boundary(Cycle boundary);
    void advance_while_halted();

    AccessOutcome read_path(Addr line);
    AccessOutcome write_path(Addr line, Version version);
    Cycle miss_tail() const; // latency after the L2 miss on the way to memory
    bool track_volatile() const;

    void fill_l1(Addr line, Version version);
    void insert_l2(Addr line, Version version, bool dirty, bool poisoned,
                   bool volatile_flag);
    void route_l2_eviction(const EvictedLine& victim);
    void route_llc_eviction(const EvictedLine& victim);
    void commit_writeback(const WriteBackEntry& entry);
    void commit_to_memory(const WriteBackEntry& entry);
    Version memory_read(Addr line);

    void maybe_scan_exclusivity();
    // committed state must match `golden` up to poison-scrambled versions
    void verify_commit_state(const GoldenMemory& golden) const;
    void finalize();
    SimReport build_report() const;
    void log(ActionType type) { log_.push_back({now_, type}); }

    RunConfig cfg_;
    std::vector<MemoryRequest> trace_;
    std::uint64_t trace_hash_;
    Addr line_mask_;

    CacheLevel l1_;
    CacheLevel l2_;
    std::optional<CacheLevel> llc_;
    WriteBuffer buffer_;
    std::unordered_map<Addr, Version> memory_; // committed state
    GoldenMemory golden_;
    MitigationController controller_;
    Checkpoint checkpoint_;

    Cycle now_ = 0;
    Cycle next_boundary_ = 0;
    Cycle next_checkpoint_ = 0;
    Cycle checkpoint_interval_ = 0;
    std::uint64_t cursor_ = 0;
    std::uint64_t replay_watermark_ = 0; // indices below this are re-runs
    bool halted_ = false;
    bool bypass_ = false;
    bool checkpointing_ = false;
    bool adapted_ = false; // adaptive interval halving fired

    std::vector<WriteBackEntry> overflow_; // evictions awaiting forced ckpt
    bool forced_checkpoint_pending_ = false;

    CycleBuckets cycles_;
    EventCounts ev_;
    EnergyCounts en_;
    std::uint64_t pending_corrupted_ = 0;
    std::uint64_t committed_corrupted_ = 0;
    std::uint64_t accesses_since_scan_ = 0;
    std::vector<Action> log_;
    std::function<void(Engine&)> rollback_observer_;
};

} // namespace sttsim
