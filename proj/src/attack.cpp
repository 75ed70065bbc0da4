#include "sttsim/attack.hpp"

#include <cmath>
#include <stdexcept>

namespace sttsim {

void AttackWaveform::validate() const {
    const AttackEpisode* prev = nullptr;
    for (const auto& ep : episodes) {
        if (ep.end_cycle < ep.start_cycle) {
            throw ConfigError("attack episode has end before start");
        }
        if (!std::isfinite(ep.peak_strength) || ep.peak_strength < 0.0) {
            throw ConfigError("attack episode peak must be finite and >= 0");
        }
        if (prev && ep.start_cycle <= prev->end_cycle) {
            throw ConfigError("attack episodes must be sorted and non-overlapping");
        }
        prev = &ep;
    }
}

double AttackWaveform::strength_at(Cycle cycle) const {
    const auto idx = episode_index_at(cycle);
    if (!idx) return 0.0;
    const AttackEpisode& ep = episodes[*idx];
    if (ep.profile == AttackProfile::step) return ep.peak_strength;
    const Cycle duration = ep.end_cycle - ep.start_cycle;
    if (duration == 0) return ep.peak_strength;
    return ep.peak_strength * (static_cast<double>(cycle - ep.start_cycle) /
                               static_cast<double>(duration));
}

std::optional<std::size_t> AttackWaveform::episode_index_at(Cycle cycle) const {
    // Few episodes in practice; linear scan keeps this trivially correct.
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        if (cycle >= episodes[i].start_cycle && cycle <= episodes[i].end_cycle) {
            return i;
        }
    }
    return std::nullopt;
}

void SensorConfig::validate() const {
    if (!(sensor_threshold > 0.0) || !std::isfinite(sensor_threshold)) {
        throw ConfigError("sensor_threshold must be finite and > 0");
    }
    if (!(functional_threshold > sensor_threshold) ||
        !std::isfinite(functional_threshold)) {
        throw ConfigError("functional_threshold must exceed sensor_threshold");
    }
    if (sample_interval == 0) {
        throw ConfigError("sample_interval must be >= 1");
    }
}

namespace {

// Strength within an episode as a function of cycle, matching strength_at.
double episode_strength(const AttackEpisode& ep, Cycle cycle) {
    if (ep.profile == AttackProfile::step) return ep.peak_strength;
    const Cycle duration = ep.end_cycle - ep.start_cycle;
    if (duration == 0) return ep.peak_strength;
    return ep.peak_strength * (static_cast<double>(cycle - ep.start_cycle) /
                               static_cast<double>(duration));
}

// Smallest cycle in [start, end] with strength >= threshold, or nullopt.
// Binary search against the same double arithmetic the sampler uses, so the
// result is exact by construction (episode strength is monotone in cycle).
std::optional<Cycle> first_cycle_at_level(const AttackEpisode& ep,
                                          double threshold) {
    if (ep.peak_strength < threshold) return std::nullopt;
    Cycle lo = ep.start_cycle;
    Cycle hi = ep.end_cycle;
    if (episode_strength(ep, lo) >= threshold) return lo;
    // invariant: strength(lo) < threshold <= strength(hi)
    while (hi - lo > 1) {
        const Cycle mid = lo + (hi - lo) / 2;
        if (episode_strength(ep, mid) >= threshold) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

Cycle next_boundary_at_or_after(Cycle cycle, Cycle interval) {
    const Cycle rem = cycle % interval;
    return rem == 0 ? cycle : cycle + (interval - rem);
}

} // namespace

std::optional<Cycle> first_asserted_sample(const SensorConfig& cfg,
                                           const AttackEpisode& ep) {
    const auto crossing = first_cycle_at_level(ep, cfg.sensor_threshold);
    if (!crossing) return std::nullopt;
    const Cycle boundary = next_boundary_at_or_after(*crossing, cfg.sample_interval);
    if (boundary > ep.end_cycle) return std::nullopt; // window too short to sample
    return boundary;
}

std::optional<Cycle> first_functional_cycle(const SensorConfig& cfg,
                                            const AttackEpisode& ep) {
    return first_cycle_at_level(ep, cfg.functional_threshold);
}

SensorReading sample_sensor(const SensorConfig& cfg, const AttackWaveform& wf,
                            Cycle cycle) {
    SensorReading r;
    r.cycle = cycle;
    r.strength = wf.strength_at(cycle);
    r.attack_asserted = r.strength >= cfg.sensor_threshold;
    if (!r.attack_asserted) return r;

    const auto idx = wf.episode_index_at(cycle);
    const AttackEpisode& ep = wf.episodes[*idx];
    const auto first = first_asserted_sample(cfg, ep);
    // Classification is fixed at the first asserted sample of the episode.
    // A sub-interval episode can assert off-boundary; classify in place then.
    const double at_first =
        first ? episode_strength(ep, *first) : r.strength;
    r.classification = at_first >= cfg.functional_threshold
                           ? AttackClass::sudden
                           : AttackClass::gradual;
    return r;
}

std::int64_t detection_lead(const SensorConfig& cfg, const AttackWaveform& wf,
                            std::size_t episode_index) {
    const AttackEpisode& ep = wf.episodes.at(episode_index);
    const auto asserted = first_asserted_sample(cfg, ep);
    if (!asserted) return 0; // sensor never fires; no detection event
    const Cycle functional =
        first_functional_cycle(cfg, ep).value_or(ep.end_cycle);
    return static_cast<std::int64_t>(functional) -
           static_cast<std::int64_t>(*asserted);
}

} // namespace sttsim
