#pragma once

#include <stdexcept>
#include <string>

namespace flexbc {

/// Shape or block-layout disagreement between operands.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent user-supplied configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Step size outside the theoretical bound for the current mask.
struct BoundViolation : std::runtime_error {
    explicit BoundViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite value or other numerical failure during a run.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace flexbc
