#pragma once

#include <stdexcept>
#include <string>

namespace hsvmc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid box or cutoff geometry (nonpositive lengths, 2*ell > L, ...).
struct GeometryError : Error {
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// A root finder could not bracket a sign change.
struct NoBracket : Error {
    using Error::Error;
};

/// An iterative scheme failed to reach the requested tolerance.
struct NonConvergence : Error {
    using Error::Error;
};

/// Requested particle number does not fit the box at the hard-core diameter.
struct PackingError : Error {
    using Error::Error;
};

/// Two particles closer than the hard-core radius where that is not allowed.
struct OverlapError : Error {
    using Error::Error;
};

/// Malformed configuration file or inconsistent run parameters.
struct ConfigError : Error {
    using Error::Error;
};

/// Not enough usable data points for a fit.
struct InsufficientData : Error {
    using Error::Error;
};

}  // namespace hsvmc
