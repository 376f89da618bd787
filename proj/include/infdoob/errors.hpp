#pragma once

#include <stdexcept>
#include <string>

namespace infdoob {

// Violated precondition of a library operation (bad exponent, nonpositive
// weight, misaligned vector, out-of-range level, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An infinite product whose constant tail factor exceeds 1.
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Stopping-time enumeration would exceed the configured cap; callers should
// fall back to a sampled family.
class EnumerationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infdoob
