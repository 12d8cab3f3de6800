#pragma once

#include <stdexcept>
#include <string>

namespace roadrel {

/// Input that violates a documented precondition (sizes, ranges, schema).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact evaluation requested beyond the configured enumeration cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An internal invariant was found broken at run time (e.g. a collision).
class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace roadrel
