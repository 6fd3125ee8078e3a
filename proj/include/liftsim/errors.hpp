#pragma once

#include <stdexcept>
#include <string>

namespace liftsim {

// Malformed or out-of-contract input. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The model admits no solution (load too heavy, nothing to reconstruct from).
// Maps to CLI exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solve failed or was too badly conditioned to trust. Maps to exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

}  // namespace detail
}  // namespace liftsim
