#pragma once

#include <stdexcept>
#include <string>

namespace immunet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A distribution with no usable mass, e.g. mean degree zero.
class DegenerateDistribution : public Error {
 public:
  using Error::Error;
};

/// Degree-sequence resampling never produced an even stub count.
class PathologicalDistribution : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The degree distribution has no giant component, so GCC-normalized
/// quantities are undefined.
class BelowTransition : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& stage, double residual, long iterations)
      : Error(stage + ": no convergence after " + std::to_string(iterations) +
              " iterations (residual " + std::to_string(residual) + ")"),
        stage_(stage),
        residual_(residual),
        iterations_(iterations) {}

  const std::string& stage() const noexcept { return stage_; }
  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  std::string stage_;
  double residual_;
  long iterations_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NoData : public Error {
 public:
  using Error::Error;
};

}  // namespace immunet
