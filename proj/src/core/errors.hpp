#pragma once

#include <stdexcept>
#include <string>

namespace fkflow {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: bad parameters or invalid input state.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Numerical failure mid-computation: non-finite state, CFL violation,
// mass leakage, domain too small.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A dual optimization did not converge; the requested targets are
// infeasible or sit on the boundary of the attainable set.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double gradient_norm)
      : Error(what), gradient_norm(gradient_norm) {}
  double gradient_norm;
};

void require(bool condition, const std::string& message);
void require_finite(double value, const std::string& name);

}  // namespace fkflow
