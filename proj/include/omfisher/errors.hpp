#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omfisher {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input outside the documented domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

// Multiple physical roots and no branch policy to choose between them.
struct AmbiguityError : Error {
  AmbiguityError(const std::string& what, std::vector<double> roots)
      : Error(what), roots(std::move(roots)) {}
  std::vector<double> roots;
};

struct CubicError : NumericalError {
  CubicError(const std::string& what, std::vector<double> coefficients)
      : NumericalError(what), coefficients(std::move(coefficients)) {}
  std::vector<double> coefficients;
};

struct QuadratureError : NumericalError {
  QuadratureError(const std::string& what, double estimate, double abs_error)
      : NumericalError(what), estimate(estimate), abs_error(abs_error) {}
  double estimate;
  double abs_error;
};

struct PreconditionError : Error {
  using Error::Error;
};

// Lyapunov operator singular: an eigenvalue pair of A sums to zero.
struct DegeneracyError : NumericalError {
  using NumericalError::NumericalError;
};

struct DerivativeUndefinedError : NumericalError {
  using NumericalError::NumericalError;
};

struct ConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};

struct UnphysicalStateError : DomainError {
  using DomainError::DomainError;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace omfisher
