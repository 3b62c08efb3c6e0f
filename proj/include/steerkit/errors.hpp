#pragma once

#include <stdexcept>
#include <string>

namespace steerkit {

/// Base class for all steerkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A vector that should be unit length is not.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should have unit trace does not.
class TraceError : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its documented domain.
class ParamError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed; the message carries field/offset context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A matrix fails the density-operator checks (Hermiticity, trace, PSD).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Two measurement settings are equal or antipodal.
class DuplicateSettingError : public Error {
 public:
  using Error::Error;
};

/// A combinatorial size cap (2^k strategies, 2^n sign vectors) was exceeded.
class CapError : public Error {
 public:
  using Error::Error;
};

/// Count data is missing a block required for reconstruction.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// The feasibility solver hit its iteration cap without reaching a
/// conclusive residual. Distinct from an infeasibility verdict.
class SolverStall : public Error {
 public:
  SolverStall(const std::string& what, double residual, int iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

}  // namespace steerkit
