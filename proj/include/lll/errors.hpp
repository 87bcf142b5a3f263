#pragma once

#include <stdexcept>
#include <string>

namespace lll {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input: bad file contents, invalid generator weights, out-of-range
/// coordinates, inconsistent metadata.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument lies outside its admissible interval.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A geometric construction required a non-degenerate input (non-zero
/// generator, full-rank movement system) and did not get one.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Checked 64-bit rational arithmetic overflowed.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant that the engine maintains was found broken.
class InvariantCorruption : public Error {
 public:
  using Error::Error;
};

/// No domain value of a variable admits a representable requirement tuple.
/// Must never fire on instances satisfying the criterion; carries the full
/// diagnostic so a firing is debuggable.
class TheoremViolation : public Error {
 public:
  TheoremViolation(const std::string& msg, long long variable_id)
      : Error(msg), variable_id(variable_id) {}
  long long variable_id;
};

/// Two same-color nodes wrote the same edge value in one parallel phase.
class IsolationViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace lll
