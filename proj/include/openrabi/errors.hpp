#pragma once

#include <stdexcept>
#include <string>

namespace openrabi {

// Thrown when inputs violate a documented precondition (bad rates, bad
// truncation size, mismatched spaces, malformed configuration values).
struct InvalidParams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A density matrix stopped satisfying its invariants (hermiticity, unit
// trace, positivity) beyond the allowed tolerances.
struct StateInvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Population leaked into the top Fock levels; the truncation is too small
// for the requested run.
struct TailOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The adaptive integrator could not meet the local error target, or a
// solver result failed its residual/positivity checks.
struct ToleranceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No normalizable stationary state exists (no energy damping while the
// counter-rotating pumping is active).
struct NoSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The generator kernel is not one-dimensional at the working tolerance.
struct DegenerateKernel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The correlator fixed-point system is singular (no damping).
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowTooShort : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The tail of a trace is not linear yet; the caller should extend t_end.
struct NonlinearTail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The truncation ladder reached its ceiling without stabilizing.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A closed-form prediction does not exist because a damping rate in its
// denominator is zero.
struct DivisionByZero : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace openrabi
