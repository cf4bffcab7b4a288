#pragma once

#include <stdexcept>
#include <string>

namespace nf {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two grid functions living on different domains were combined.
struct DomainMismatchError : Error {
    using Error::Error;
};

/// The scaling map has no zero (some b_i vanishes).
struct NoZeroError : Error {
    using Error::Error;
};

/// An iterative solver hit its iteration cap without meeting tolerance.
struct NonConvergenceError : Error {
    using Error::Error;
};

/// A state is outside the admissible sphere subset (some positive part vanishes).
struct NotInUError : Error {
    using Error::Error;
};

/// normalize_to_sphere received a component with zero Dirichlet norm.
struct ZeroComponentError : Error {
    using Error::Error;
};

/// A Newton linearization could not be factorized.
struct SingularJacobianError : Error {
    using Error::Error;
};

/// The Newton residual failed to decrease over repeated step halvings.
struct DivergenceError : Error {
    using Error::Error;
};

/// An iterate exceeded the configured amplitude guard.
struct BoundGuardError : Error {
    using Error::Error;
};

/// Continuation stalled: the step size hit its floor.
struct StepFloorError : Error {
    double last_good_t = 0.0;
    StepFloorError(const std::string& msg, double t) : Error(msg), last_good_t(t) {}
};

/// The synchronized-existence criterion does not hold.
struct CriterionError : Error {
    using Error::Error;
};

/// Configuration file could not be parsed or validated.
struct ConfigError : Error {
    using Error::Error;
};

/// Parameter values violate a structural constraint (signs, exponent ranges).
struct InvalidParamsError : Error {
    using Error::Error;
};

} // namespace nf
