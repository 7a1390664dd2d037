#pragma once

#include <stdexcept>
#include <string>

namespace nnls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, scenario or solver configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two fields defined on different grids were combined.
class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
};

/// A closed-form profile was evaluated at a singular point.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

/// Modulation Newton fit did not converge.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double r1, double r2, int iterations)
      : Error(what), residual_phase(r1), residual_scale(r2), iterations(iterations) {}
  double residual_phase;
  double residual_scale;
  int iterations;
};

/// The modulation equations are singular at the supplied state.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

}  // namespace nnls
