#pragma once

#include <stdexcept>
#include <string>

namespace opsq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, e.g. "validation".
  virtual const char* kind() const noexcept { return "error"; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};

/// A value failed one of the documented invariants of its type.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& what)
      : Error(invariant + ": " + what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }
  const char* kind() const noexcept override { return "validation"; }

 private:
  std::string invariant_;
};

class IndexError : public ValidationError {
 public:
  explicit IndexError(const std::string& what)
      : ValidationError("index_out_of_range", what) {}
};

/// The oracle refused a full-space dimension above its guard.
class GuardError : public ValidationError {
 public:
  explicit GuardError(const std::string& what)
      : ValidationError("dimension_guard", what) {}
};

/// A scalar or spectral value lies outside the declared domain of a function.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double offending)
      : Error(what), value_(offending) {}
  double value() const noexcept { return value_; }
  const char* kind() const noexcept override { return "domain"; }

 private:
  double value_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

/// Boson truncation leaked more population into the top Fock level than allowed.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, double leaked)
      : NumericalError(what), leaked_(leaked) {}
  double leaked() const noexcept { return leaked_; }

 private:
  double leaked_;
};

}  // namespace opsq
