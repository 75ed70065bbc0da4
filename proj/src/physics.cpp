#include "sttsim/physics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sttsim {

namespace {

void require_finite_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw std::invalid_argument(std::string("mtj parameter ") + name +
                                    " must be finite and > 0");
    }
}

} // namespace

void MtjParams::validate() const {
    require_finite_positive(fit_constant_s, "fit_constant_s");
    require_finite_positive(fit_exponent, "fit_exponent");
    require_finite_positive(energy_barrier_j, "energy_barrier_j");
    require_finite_positive(boltzmann_j_per_k, "boltzmann_j_per_k");
    require_finite_positive(nominal_temperature_k, "nominal_temperature_k");
    require_finite_positive(critical_strength, "critical_strength");
}

double thermal_barrier(const MtjParams& p, double temperature_k) {
    if (!(temperature_k > 0.0)) {
        throw std::domain_error("thermal_barrier: temperature must be > 0");
    }
    return p.energy_barrier_j / (p.boltzmann_j_per_k * temperature_k);
}

double retention_time(const MtjParams& p, double barrier) {
    if (!(barrier >= 0.0)) {
        throw std::domain_error("retention_time: barrier must be >= 0");
    }
    // C * e^x overflows iff ln(C) + x exceeds ln(DBL_MAX) ~ 709.78.
    const double exponent = p.fit_exponent * barrier;
    if (std::log(p.fit_constant_s) + exponent >= 709.0) {
        return std::numeric_limits<double>::max();
    }
    return p.fit_constant_s * std::exp(exponent);
}

double effective_barrier(const MtjParams& p, double strength) {
    if (!(strength >= 0.0)) {
        throw std::domain_error("effective_barrier: strength must be >= 0");
    }
    const double delta0 = thermal_barrier(p, p.nominal_temperature_k);
    const double scale = 1.0 - strength / p.critical_strength;
    return delta0 * (scale > 0.0 ? scale : 0.0);
}

double flip_probability(const MtjParams& p, double strength, double dt_s) {
    if (!(dt_s >= 0.0)) {
        throw std::domain_error("flip_probability: dt must be >= 0");
    }
    const double t_ret = retention_time(p, effective_barrier(p, strength));
    // -expm1(-x) keeps precision for tiny x; the clamp keeps the result
    // strictly below 1 when x is large enough that 1 - e^-x rounds to 1.
    const double prob = -std::expm1(-dt_s / t_ret);
    constexpr double kBelowOne = 1.0 - 0x1.0p-53;
    return prob < kBelowOne ? prob : kBelowOne;
}

} // namespace sttsim
