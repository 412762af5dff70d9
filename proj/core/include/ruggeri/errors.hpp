#pragma once

#include <stdexcept>
#include <string>

namespace ruggeri {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state lies outside the admissible set (rho, theta, tau must be positive).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameters or run settings are inconsistent with the requested system.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A closed-form identity that must hold was found violated.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

/// The pencil (A1, A0) has a complex spectrum beyond tolerance.
class HyperbolicityLoss : public Error {
 public:
  using Error::Error;
};

/// A conserved vector does not map back to an admissible primitive state.
class ReconstructionError : public DomainError {
 public:
  ReconstructionError(const std::string& what, double offending_value)
      : DomainError(what), offending_value_(offending_value) {}

  double offending_value() const noexcept { return offending_value_; }

 private:
  double offending_value_;
};

/// The solver produced an inadmissible cell or face state.
class AdmissibilityViolation : public Error {
 public:
  AdmissibilityViolation(const std::string& what, int cell, double time)
      : Error(what), cell_(cell), time_(time) {}

  int cell() const noexcept { return cell_; }
  double time() const noexcept { return time_; }

 private:
  int cell_;
  double time_;
};

}  // namespace ruggeri
