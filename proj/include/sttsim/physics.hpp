#pragma once

// MTJ retention model. Retention time follows t = C * e^(k * delta) with
// thermal stability factor delta = E / (kB * T). An external field of
// normalized strength s degrades the barrier linearly and destroys it at
// critical_strength; per-window flip probability is the exponential
// survival model 1 - e^(-dt / t_ret).

namespace sttsim {

struct MtjParams {
    double fit_constant_s = 1e-9;  // C, seconds
    double fit_exponent = 1.0;     // k, dimensionless
    // Barrier energy chosen so delta = 60 at 300 K: 60 * kB * 300.
    double energy_barrier_j = 2.4851682e-19;
    double boltzmann_j_per_k = 1.380649e-23; // CODATA exact value
    double nominal_temperature_k = 300.0;
    double critical_strength = 2.0; // field strength that zeroes the barrier

    // Throws std::invalid_argument when any parameter is non-positive or
    // non-finite.
    void validate() const;
};

// delta = E / (kB * T). Throws std::domain_error for temperature <= 0.
double thermal_barrier(const MtjParams& p, double temperature_k);

// t = C * e^(k * delta), saturated at the largest finite double.
// Throws std::domain_error for barrier < 0.
double retention_time(const MtjParams& p, double barrier);

// delta(s) = delta0 * max(0, 1 - s / critical_strength), where delta0 is the
// barrier at the nominal temperature. Throws std::domain_error for s < 0.
double effective_barrier(const MtjParams& p, double strength);

// 1 - e^(-dt / retention_time(effective_barrier(s))), clamped below 1 so a
// uniform draw in [0, 1) can always represent "no flip".
// Throws std::domain_error for dt < 0 or s < 0.
double flip_probability(const MtjParams& p, double strength, double dt_s);

} // namespace sttsim
