#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcsft {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a documented precondition (not J-commuting, not unit,
/// not hermitian, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (factorization of an indefinite matrix, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Implicit-midpoint fixed-point iteration did not converge.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace pcsft
