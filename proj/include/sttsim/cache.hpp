#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sttsim/types.hpp"

// Set-associative cache level with true-LRU replacement, plus the LLC write
// buffer. Both are pure state containers: no latency or energy accounting
// happens here, the engine charges costs around these calls.

namespace sttsim {

struct CacheGeometry {
    std::uint64_t capacity_bytes = 0;
    std::uint32_t ways = 1;
    std::uint32_t line_size = 64;

    // Throws ConfigError unless line size and set count are powers of two,
    // ways >= 1, and capacity divides evenly into sets.
    void validate() const;

    std::uint64_t num_lines() const { return capacity_bytes / line_size; }
    std::uint64_t num_sets() const { return num_lines() / ways; }
};

struct CacheLine {
    std::uint64_t tag = 0;
    Version version = 0;
    std::uint32_t lru_rank = 0; // 0 = most recent among valid lines in the set
    bool valid = false;
    bool dirty = false;
    bool poisoned = false;
    bool volatile_flag = false; // speculative since last checkpoint
};

// A line leaving a level, carrying its write-back obligation and taint.
struct EvictedLine {
    Addr address = 0;
    Version version = 0;
    bool dirty = false;
    bool poisoned = false;
    bool volatile_flag = false;
};

struct WriteBackEntry {
    Addr address = 0;
    Version version = 0;
};

class CacheLevel {
  public:
    explicit CacheLevel(const CacheGeometry& geometry);

    const CacheGeometry& geometry() const { return geo_; }

    // Probe without touching recency state.
    const CacheLine* lookup(Addr address) const;

    // Read hit: refresh LRU and return the stored version and poison state.
    struct ReadResult {
        Version version;
        bool poisoned;
    };
    std::optional<ReadResult> read(Addr address);

    // Write hit: update version in place, mark dirty, clear poison. Returns
    // false on miss (no allocation here; the engine decides what misses do).
    bool write(Addr address, Version version, bool mark_volatile);

    // Install a line as MRU. Evicts true-LRU when the set is full and
    // returns the victim. Inserting an already-present address is a caller
    // bug (breaks exclusivity bookkeeping) and throws InvariantViolation.
    std::optional<EvictedLine> insert(Addr address, Version version, bool dirty,
                                      bool poisoned = false,
                                      bool mark_volatile = false);

    // Drop one line without write-back. Returns whether it was present.
    bool invalidate(Addr address);

    // Write back every dirty line and invalidate everything. Entries are
    // emitted in ascending (set, way) order for determinism.
    std::vector<WriteBackEntry> flush();

    // Checkpoint path: emit dirty lines in (set, way) order and mark them
    // clean; lines stay valid and keep their LRU position.
    std::vector<WriteBackEntry> write_back_dirty();

    // Drop everything without write-back. Returns how many lines were valid.
    std::uint64_t invalidate_all();

    void clear_volatile_flags();

    // One Bernoulli draw per valid unpoisoned line, keyed on
    // (seed, cycle, set, way) so results are order-independent and
    // reproducible. Flipped lines get poisoned and their version scrambled
    // into the top half of the version space (golden versions are sequential
    // and never reach it). Returns the number of new flips.
    std::uint64_t apply_corruption(double flip_prob, std::uint64_t seed,
                                   Cycle cycle);

    std::uint64_t valid_count() const { return valid_count_; }
    std::uint64_t unpoisoned_valid_count() const { return unpoisoned_count_; }
    std::uint64_t dirty_count() const { return dirty_count_; }

    // Valid line addresses in ascending (set, way) order, for exclusivity
    // scans and tests.
    std::vector<Addr> resident_addresses() const;

  private:
    CacheLine* find(Addr address);
    void touch(std::uint64_t set, std::uint32_t way);
    std::uint64_t set_of(Addr address) const;
    std::uint64_t tag_of(Addr address) const;
    Addr address_of(std::uint64_t set, std::uint64_t tag) const;
    CacheLine& at(std::uint64_t set, std::uint32_t way) {
        return lines_[set * geo_.ways + way];
    }
    const CacheLine& at(std::uint64_t set, std::uint32_t way) const {
        return lines_[set * geo_.ways + way];
    }

    CacheGeometry geo_;
    std::uint64_t sets_;
    std::uint32_t line_shift_;
    std::vector<CacheLine> lines_;          // sets_ x ways, row-major
    std::vector<std::uint32_t> set_valid_;  // valid lines per set
    std::uint64_t valid_count_ = 0;
    std::uint64_t unpoisoned_count_ = 0;
    std::uint64_t dirty_count_ = 0;
};

// FIFO write buffer between the LLC and memory. While masked, entries are
// held until the next checkpoint drains them; push reports a full-signal
// instead of dropping, and the caller must checkpoint before retrying.
class WriteBuffer {
  public:
    explicit WriteBuffer(std::size_t capacity) : capacity_(capacity) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool masked() const { return masked_; }
    void set_masked(bool masked) { masked_ = masked; }

    // False = full-signal; the entry was not queued.
    bool push(const WriteBackEntry& entry) {
        if (entries_.size() >= capacity_) return false;
        entries_.push_back(entry);
        return true;
    }

    // Newest queued version for the line, if any. Read path correctness
    // while masked: held write-backs are architecturally committed state.
    std::optional<Version> snoop(Addr address) const {
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
            if (it->address == address) return it->version;
        }
        return std::nullopt;
    }

    // Pop everything in FIFO order (commit to memory at the caller).
    std::vector<WriteBackEntry> drain() {
        std::vector<WriteBackEntry> out(entries_.begin(), entries_.end());
        entries_.clear();
        return out;
    }

    // Rollback path: held entries belong to the squashed epoch.
    void discard() { entries_.clear(); }

  private:
    std::size_t capacity_;
    bool masked_ = false;
    std::deque<WriteBackEntry> entries_;
};

} // namespace sttsim
