#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sttsim/types.hpp"

// Attack waveforms and the threshold sensor. An attack is a list of
// non-overlapping episodes; each contributes field strength 0 outside its
// [start, end] window (both ends inclusive). The sensor samples strength
// every sample_interval cycles and asserts at sensor_threshold; an episode
// is classified once, at its first asserted sample: sudden if the strength
// there already reaches functional_threshold, gradual otherwise.

namespace sttsim {

enum class AttackProfile { ramp, step };

struct AttackEpisode {
    Cycle start_cycle = 0;
    Cycle end_cycle = 0;
    AttackProfile profile = AttackProfile::ramp;
    double peak_strength = 0.0;
};

struct AttackWaveform {
    std::vector<AttackEpisode> episodes;

    // Throws ConfigError unless episodes are sorted, non-overlapping
    // (next.start > prev.end), have end >= start and finite peak >= 0.
    void validate() const;

    // 0 outside every episode; ramp interpolates linearly from 0 at start
    // to peak at end, step holds peak across the whole window.
    double strength_at(Cycle cycle) const;

    // Index of the episode containing `cycle`, if any.
    std::optional<std::size_t> episode_index_at(Cycle cycle) const;
};

struct SensorConfig {
    double sensor_threshold = 1.0;     // assert level
    double functional_threshold = 2.0; // data-loss level, mirrors critical_strength
    Cycle sample_interval = 100;
    // Design point for how much ramp warning the sensor placement buys;
    // used by sweep waveform construction, not by sampling itself.
    Cycle lead_cycles = 200000;

    // Throws ConfigError unless 0 < sensor < functional and interval >= 1.
    void validate() const;
};

enum class AttackClass { none, gradual, sudden };

struct SensorReading {
    Cycle cycle = 0;
    double strength = 0.0;
    bool attack_asserted = false;
    AttackClass classification = AttackClass::none;
};

// First sample boundary (multiple of sample_interval) inside the episode
// where strength >= sensor_threshold, or nullopt if the sensor never
// asserts within the episode.
std::optional<Cycle> first_asserted_sample(const SensorConfig& cfg,
                                           const AttackEpisode& ep);

// First cycle inside the episode where strength >= functional_threshold,
// or nullopt if the peak never reaches it.
std::optional<Cycle> first_functional_cycle(const SensorConfig& cfg,
                                            const AttackEpisode& ep);

// Sample the sensor at `cycle` (need not be a boundary; callers sample on
// boundaries). Classification is sticky per episode as described above.
SensorReading sample_sensor(const SensorConfig& cfg, const AttackWaveform& wf,
                            Cycle cycle);

// Signed cycles between first asserted sample A and first functional-loss
// cycle F (episode end stands in for F when the peak stays sub-functional):
// F - A. Negative means the sensor fired after the damage level was already
// reached (steps). 0 when the sensor never asserts for this episode.
// Throws std::out_of_range for a bad index.
std::int64_t detection_lead(const SensorConfig& cfg, const AttackWaveform& wf,
                            std::size_t episode_index);

} // namespace sttsim
