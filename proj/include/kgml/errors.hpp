#pragma once

#include <stdexcept>
#include <string>

namespace kgml {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside the region where an operation is defined
/// (series disk, bound-state energy range, ...).
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

/// Physics-domain failures: supercritical coupling, parameter poles,
/// degenerate deformations. The CLI maps these to exit code 2.
class PhysicsDomainError : public Error {
 public:
  using Error::Error;
};

class SupercriticalError : public PhysicsDomainError {
 public:
  using PhysicsDomainError::PhysicsDomainError;
};

class ParameterPoleError : public PhysicsDomainError {
 public:
  using PhysicsDomainError::PhysicsDomainError;
};

class DegenerateDeformationError : public PhysicsDomainError {
 public:
  using PhysicsDomainError::PhysicsDomainError;
};

class RootFindingError : public Error {
 public:
  using Error::Error;
};

class IrregularPointError : public Error {
 public:
  using Error::Error;
};

class ResonantExponentError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// |psi| oscillates on the fit window, so a single power law is meaningless.
class OscillationError : public Error {
 public:
  using Error::Error;
};

class BracketingError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgml
