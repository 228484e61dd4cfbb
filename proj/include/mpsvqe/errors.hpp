#pragma once

#include <stdexcept>
#include <string>

namespace mpsvqe {

// Malformed input: bad arguments, bad files, inconsistent configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite energies, divergence guards, failed fits.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense representations refused above their qubit limit.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace mpsvqe
