#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sttsim {

using Addr = std::uint64_t;
using Cycle = std::uint64_t;
using Version = std::uint64_t;

// Thrown for malformed or inconsistent configuration input. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown for malformed trace input. CLI exit code 3.
struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a simulator invariant is violated (exclusivity breach,
// commit-state divergence, cycle accounting mismatch). CLI exit code 4.
// A run that trips this must abort, never report numbers.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Caller used an operation outside its legal protocol state
// (e.g. bypass access while bypass is inactive).
struct ProtocolError : std::logic_error {
    using std::logic_error::logic_error;
};

// Request issued while the engine is halted by the stall mitigation.
struct HaltedError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace sttsim
