#pragma once

#include <stdexcept>
#include <string>

namespace regret_forge {

/// Malformed game structure (inconsistent infosets, bad children, ...).
struct GameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid solver or run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// NaN/Inf encountered, or an iterative numeric routine failed to converge.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace regret_forge
