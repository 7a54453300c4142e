#pragma once

#include <stdexcept>
#include <string>

namespace hvlab {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
    using Error::Error;
};

/// Hypothesis of an inequality or embedding is violated (e.g. gamma <= p-1).
struct AdmissibilityError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

/// Finite-difference stencil cannot be placed (too close to the axis).
struct StencilError : Error {
    using Error::Error;
};

/// NaN or infinity encountered in a quadrature or pointwise map.
struct NumericsError : Error {
    using Error::Error;
};

/// Linear solve failed to reach its tolerance.
struct SolverError : Error {
    using Error::Error;
};

/// Iteration budget exhausted. Callers that have a partial result attach it
/// in a derived type.
struct MaxIterError : Error {
    using Error::Error;
};

/// Mountain-pass path degenerated: its maximum fell below the ring level.
struct CollapseError : Error {
    using Error::Error;
};

/// Moser ladder exponent exceeded the overflow cap.
struct ExponentCapError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace hvlab
