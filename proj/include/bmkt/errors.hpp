#pragma once

#include <stdexcept>
#include <string>

namespace bmkt {

/// Root of the library's exception hierarchy. Each subclass maps onto one
/// CLI exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (lengths, steps, files).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The requested (model, route) combination is not implemented.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure missed its accuracy target. `achieved` carries the
/// best error estimate that was reached.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// An iterative solver exhausted its budget; `residual` is the final residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A covariance sequence or spectrum is not nonnegative beyond the clamp.
class SpectralPositivityError : public DomainError {
 public:
  SpectralPositivityError(const std::string& what, double worst)
      : DomainError(what), worst_(worst) {}
  double worst() const noexcept { return worst_; }

 private:
  double worst_;
};

/// CLI exit codes: 0 success, 2 input/domain, 3 capability, 4 accuracy.
inline int exit_code(const Error& e) noexcept {
  if (dynamic_cast<const CapabilityError*>(&e)) return 3;
  if (dynamic_cast<const AccuracyError*>(&e) || dynamic_cast<const ConvergenceError*>(&e)) return 4;
  return 2;
}

}  // namespace bmkt
