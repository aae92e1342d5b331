#pragma once

#include <stdexcept>
#include <string>

namespace decay2d {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to an operation (bad grid size, wrong exponent, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// NaN or infinity met where a finite value is required.
class NumericalFault : public Error {
public:
  using Error::Error;
};

/// Inputs for which a ratio is undefined (zero norms in a denominator).
class DegenerateInput : public Error {
public:
  using Error::Error;
};

/// Dirichlet truncation would let the domain of influence reach the boundary.
class ConeViolation : public Error {
public:
  ConeViolation(const std::string& what, double max_t_final)
      : Error(what), max_t_final_(max_t_final) {}
  double max_t_final() const noexcept { return max_t_final_; }

private:
  double max_t_final_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace decay2d
