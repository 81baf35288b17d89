#pragma once

#include <stdexcept>
#include <string>

namespace minidiss {

/// Operands whose dimensions do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a structural precondition (Hermiticity, trace
/// preservation, positivity, indefinite unitarity, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a result outside its numerical tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace minidiss
