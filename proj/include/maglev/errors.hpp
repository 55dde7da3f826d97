#pragma once

#include <stdexcept>
#include <string>

namespace maglev {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates its documented precondition or invariant.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A trajectory component left the admissible range (blow-up).
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, double tau)
        : Error(what), tau_(tau) {}

    /// Normalized time at which divergence was detected.
    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

/// Polar slow-flow coordinates are undefined: some amplitude is at or
/// below the chart floor.
class SingularChart : public Error {
public:
    using Error::Error;
};

/// The second-order expansion is invalid because W4 or beta3 sits on the
/// 1:1 resonance with the mechanical frequency; use the internal-resonance
/// analysis instead.
class ResonantDenominator : public Error {
public:
    using Error::Error;
};

/// Stroboscopic sampling was requested on a trajectory whose step does not
/// divide the forcing period.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, int column = 0)
        : Error(what), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

} // namespace maglev
