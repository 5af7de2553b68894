#pragma once

#include <stdexcept>
#include <string>

namespace symop {

/// Block shapes or algebras do not match.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An argument lies outside the domain of the operation (non-self-adjoint
/// input to a spectral routine, zero vector for a support functional, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotSurjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No central projection candidate reproduces T L_a T^{-1} in split form.
class NotFactorable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ClassificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FactorizationRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A block on which neither member of a commuting pair is scalar.
class HypothesisViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symop
