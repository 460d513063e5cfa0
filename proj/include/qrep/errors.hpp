#pragma once

#include <stdexcept>
#include <string>

namespace qrep {

// Bad input from the caller (parameters, strings, sizes out of range).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Problem too large for the configured limits.
class Intractable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular system, non-convergence, step caps, failed verification.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrep
