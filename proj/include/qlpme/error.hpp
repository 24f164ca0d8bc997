#pragma once

#include <stdexcept>
#include <string>

namespace qlpme {

/// Bad input: out-of-range parameters, mismatched grids, malformed data.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf, failed linear solve, or a nonnegativity breach in a time step.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A monitored property (maximum principle, coercivity) did not hold.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace qlpme
