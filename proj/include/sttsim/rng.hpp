#pragma once

#include <cstdint>
#include <string_view>

// Deterministic RNG and hashing primitives. Everything here is fixed-width
// integer math so results are identical across platforms and runs; std::
// distributions are deliberately avoided (their output is
// implementation-defined).

namespace sttsim {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive combiner for keyed draws (seed, cycle, set, way, ...).
inline constexpr std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ v);
}

// Top 53 bits -> [0, 1). Every double in the output grid is reachable and
// the mapping is exact, so draws compare against probabilities reproducibly.
inline constexpr double to_unit_double(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline constexpr std::uint64_t fnv1a64(std::string_view s,
                                       std::uint64_t h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

// xoshiro256** by Blackman/Vigna. Used for trace synthesis where a stream
// (rather than keyed draws) is the natural shape.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        // splitmix-seeded per the reference initialization recipe
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            w = splitmix64(x - 0x9e3779b97f4a7c15ULL);
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double next_unit() { return to_unit_double(next()); }

    // Unbiased [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

} // namespace sttsim
