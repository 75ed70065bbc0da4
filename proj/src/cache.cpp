#include "sttsim/cache.hpp"

#include <bit>
#include <stdexcept>

#include "sttsim/rng.hpp"

namespace sttsim {

void CacheGeometry::validate() const {
    if (line_size == 0 || !std::has_single_bit(line_size)) {
        throw ConfigError("cache line size must be a power of two");
    }
    if (ways == 0) {
        throw ConfigError("cache associativity must be >= 1");
    }
    if (capacity_bytes == 0 ||
        capacity_bytes % (static_cast<std::uint64_t>(line_size) * ways) != 0) {
        throw ConfigError("cache capacity must be a multiple of line_size * ways");
    }
    if (!std::has_single_bit(num_sets())) {
        throw ConfigError("cache set count must be a power of two");
    }
}

CacheLevel::CacheLevel(const CacheGeometry& geometry) : geo_(geometry) {
    geo_.validate();
    sets_ = geo_.num_sets();
    line_shift_ = static_cast<std::uint32_t>(std::countr_zero(
        static_cast<std::uint64_t>(geo_.line_size)));
    lines_.resize(sets_ * geo_.ways);
    set_valid_.assign(sets_, 0);
}

std::uint64_t CacheLevel::set_of(Addr address) const {
    return (address >> line_shift_) & (sets_ - 1);
}

std::uint64_t CacheLevel::tag_of(Addr address) const {
    return (address >> line_shift_) / sets_;
}

Addr CacheLevel::address_of(std::uint64_t set, std::uint64_t tag) const {
    return (tag * sets_ + set) << line_shift_;
}

CacheLine* CacheLevel::find(Addr address) {
    const std::uint64_t set = set_of(address);
    const std::uint64_t tag = tag_of(address);
    for (std::uint32_t w = 0; w < geo_.ways; ++w) {
        CacheLine& line = at(set, w);
        if (line.valid && line.tag == tag) return &line;
    }
    return nullptr;
}

const CacheLine* CacheLevel::lookup(Addr address) const {
    return const_cast<CacheLevel*>(this)->find(address);
}

void CacheLevel::touch(std::uint64_t set, std::uint32_t way) {
    const std::uint32_t old_rank = at(set, way).lru_rank;
    if (old_rank == 0) return;
    for (std::uint32_t w = 0; w < geo_.ways; ++w) {
        CacheLine& line = at(set, w);
        if (line.valid && line.lru_rank < old_rank) ++line.lru_rank;
    }
    at(set, way).lru_rank = 0;
}

std::optional<CacheLevel::ReadResult> CacheLevel::read(Addr address) {
    CacheLine* line = find(address);
    if (!line) return std::nullopt;
    const std::uint64_t set = set_of(address);
    touch(set, static_cast<std::uint32_t>(line - &at(set, 0)));
    return ReadResult{line->version, line->poisoned};
}

bool CacheLevel::write(Addr address, Version version, bool mark_volatile) {
    CacheLine* line = find(address);
    if (!line) return false;
    const std::uint64_t set = set_of(address);
    touch(set, static_cast<std::uint32_t>(line - &at(set, 0)));
    if (line->poisoned) {
        line->poisoned = false; // overwrite replaces the corrupted value
        ++unpoisoned_count_;
    }
    if (!line->dirty) {
        line->dirty = true;
        ++dirty_count_;
    }
    if (mark_volatile) line->volatile_flag = true;
    line->version = version;
    return true;
}

std::optional<EvictedLine> CacheLevel::insert(Addr address, Version version,
                                              bool dirty, bool poisoned,
                                              bool mark_volatile) {
    if (find(address)) {
        throw InvariantViolation("insert of an already-resident line");
    }
    const std::uint64_t set = set_of(address);
    std::optional<EvictedLine> victim;
    CacheLine* slot = nullptr;

    if (set_valid_[set] < geo_.ways) {
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            if (!at(set, w).valid) {
                slot = &at(set, w);
                break;
            }
        }
        ++set_valid_[set];
    } else {
        // evict true-LRU (unique max rank among valid lines)
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            CacheLine& line = at(set, w);
            if (line.valid && line.lru_rank == geo_.ways - 1) {
                slot = &line;
                break;
            }
        }
        victim = EvictedLine{address_of(set, slot->tag), slot->version,
                             slot->dirty, slot->poisoned, slot->volatile_flag};
        --valid_count_;
        if (!slot->poisoned) --unpoisoned_count_;
        if (slot->dirty) --dirty_count_;
        slot->valid = false;
    }

    for (std::uint32_t w = 0; w < geo_.ways; ++w) {
        CacheLine& line = at(set, w);
        if (line.valid) ++line.lru_rank;
    }
    *slot = CacheLine{tag_of(address), version, 0,
                      true,            dirty,   poisoned, mark_volatile};
    ++valid_count_;
    if (!poisoned) ++unpoisoned_count_;
    if (dirty) ++dirty_count_;
    return victim;
}

bool CacheLevel::invalidate(Addr address) {
    CacheLine* line = find(address);
    if (!line) return false;
    const std::uint64_t set = set_of(address);
    const std::uint32_t removed_rank = line->lru_rank;
    line->valid = false;
    --set_valid_[set];
    --valid_count_;
    if (!line->poisoned) --unpoisoned_count_;
    if (line->dirty) --dirty_count_;
    // keep ranks compact so the LRU victim is always rank ways-1
    for (std::uint32_t w = 0; w < geo_.ways; ++w) {
        CacheLine& other = at(set, w);
        if (other.valid && other.lru_rank > removed_rank) --other.lru_rank;
    }
    return true;
}

std::vector<WriteBackEntry> CacheLevel::flush() {
    std::vector<WriteBackEntry> out;
    out.reserve(dirty_count_);
    for (std::uint64_t s = 0; s < sets_; ++s) {
        if (set_valid_[s] == 0) continue;
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            const CacheLine& line = at(s, w);
            if (line.valid && line.dirty) {
                out.push_back({address_of(s, line.tag), line.version});
            }
        }
    }
    invalidate_all();
    return out;
}

std::vector<WriteBackEntry> CacheLevel::write_back_dirty() {
    std::vector<WriteBackEntry> out;
    out.reserve(dirty_count_);
    for (std::uint64_t s = 0; s < sets_; ++s) {
        if (set_valid_[s] == 0) continue;
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            CacheLine& line = at(s, w);
            if (line.valid && line.dirty) {
                out.push_back({address_of(s, line.tag), line.version});
                line.dirty = false;
            }
        }
    }
    dirty_count_ = 0;
    return out;
}

std::uint64_t CacheLevel::invalidate_all() {
    const std::uint64_t dropped = valid_count_;
    for (auto& line : lines_) line = CacheLine{};
    set_valid_.assign(sets_, 0);
    valid_count_ = 0;
    unpoisoned_count_ = 0;
    dirty_count_ = 0;
    return dropped;
}

void CacheLevel::clear_volatile_flags() {
    for (auto& line : lines_) line.volatile_flag = false;
}

std::uint64_t CacheLevel::apply_corruption(double flip_prob, std::uint64_t seed,
                                           Cycle cycle) {
    if (!(flip_prob >= 0.0) || !(flip_prob <= 1.0)) {
        throw std::domain_error("apply_corruption: flip_prob must be in [0, 1]");
    }
    if (flip_prob == 0.0 || unpoisoned_count_ == 0) return 0;
    std::uint64_t flips = 0;
    const std::uint64_t base = hash_mix(seed, cycle);
    for (std::uint64_t s = 0; s < sets_; ++s) {
        if (set_valid_[s] == 0) continue;
        const std::uint64_t set_key = hash_mix(base, s);
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            CacheLine& line = at(s, w);
            if (!line.valid || line.poisoned) continue;
            const std::uint64_t draw = hash_mix(set_key, w);
            if (to_unit_double(draw) < flip_prob) {
                line.poisoned = true;
                // top half of the version space never holds golden versions
                line.version = 0x8000000000000000ULL | splitmix64(draw);
                --unpoisoned_count_;
                ++flips;
            }
        }
    }
    return flips;
}

std::vector<Addr> CacheLevel::resident_addresses() const {
    std::vector<Addr> out;
    out.reserve(valid_count_);
    for (std::uint64_t s = 0; s < sets_; ++s) {
        if (set_valid_[s] == 0) continue;
        for (std::uint32_t w = 0; w < geo_.ways; ++w) {
            const CacheLine& line = at(s, w);
            if (line.valid) out.push_back(address_of(s, line.tag));
        }
    }
    return out;
}

} // namespace sttsim
