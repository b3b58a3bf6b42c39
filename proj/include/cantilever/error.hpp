#pragma once

#include <stdexcept>
#include <string>

namespace cantilever {

/// Invalid input: bad counts, out-of-range indices, malformed configuration.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (no bracket, non-finite value, failed factorization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cantilever
