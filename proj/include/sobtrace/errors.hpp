#pragma once

#include <stdexcept>
#include <string>

namespace sobtrace {

struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientData : InvalidInput {
    explicit InsufficientData(const std::string& what) : InvalidInput(what) {}
};

struct DegenerateChord : InvalidInput {
    explicit DegenerateChord(const std::string& what) : InvalidInput(what) {}
};

/// Quadrature or iterative solve failed to reach the requested tolerance.
/// Carries the best estimate obtained before giving up.
struct ToleranceNotMet : std::runtime_error {
    double best_estimate;
    ToleranceNotMet(const std::string& what, double best)
        : std::runtime_error(what), best_estimate(best) {}
};

/// A structural invariant was violated; indicates a bug, not bad input.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// The configured constants are incompatible with the input geometry
/// (typically: a flatness threshold admitted a set that is not flat enough).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sobtrace
