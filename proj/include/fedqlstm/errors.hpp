#pragma once

#include <stdexcept>

namespace fedqlstm {

// Bad user-facing configuration: qubit counts out of range, empty datasets,
// degenerate target functions, invalid hyperparameters.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structural inconsistency between values that should already agree:
// mismatched shapes, invalid qubit indices, malformed parameter blocks.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values where finite numbers are required (losses, gradients).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedqlstm
