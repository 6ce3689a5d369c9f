#pragma once

#include <stdexcept>
#include <string>

namespace bhlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weight or potential evaluated where it is infinite (y = 0 with eps = 0).
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Integral of rho^{-a} diverges at the origin.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_error(achieved) {}
  double achieved_error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class InvalidSpacingError : public Error {
 public:
  using Error::Error;
};

class ChartViolationError : public Error {
 public:
  using Error::Error;
};

class AmbiguousProjectionError : public Error {
 public:
  using Error::Error;
};

class EllipticityError : public Error {
 public:
  using Error::Error;
};

class NonFiniteWeightError : public Error {
 public:
  using Error::Error;
};

class ParityError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best)
      : Error(what), best_residual(best) {}
  double best_residual;
};

/// Structural hypothesis on the coefficients violated (e.g. T(x,0) != 0).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bhlab
