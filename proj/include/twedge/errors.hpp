#pragma once

#include <stdexcept>
#include <string>

namespace twedge {

/// Argument outside the mathematical domain of a function (non-finite input, xi <= 0, ...).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Caller asked for an incompatible combination (e.g. averaged centering for GOE).
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A quadrature or determinant did not reach its convergence contract.
struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Arithmetic broke down (e.g. a block determinant came out clearly negative).
struct numerical_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace twedge
