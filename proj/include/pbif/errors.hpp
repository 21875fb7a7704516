#pragma once

#include <stdexcept>
#include <string>

namespace pbif {

// Bad user input (config files, flag values, malformed weight tables).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// An iteration or quadrature failed to reach its tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pbif
