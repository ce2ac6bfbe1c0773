#pragma once

#include <stdexcept>
#include <string>

namespace truncdep {

/// Argument outside the domain of a model function (bad parameter, point
/// outside the support, observation outside the truncation region).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative routine (root finder, quadrature, optimizer) hit its cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical invariant that must hold for admissible inputs was violated.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace truncdep
