#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace crfv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Malformed or degenerate mesh input.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside of its mathematical domain (negative density, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant that holds in exact arithmetic was violated.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Linear or nonlinear solver failure. `residual` carries the last measured residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Picard iteration exhausted its budget.
class NonConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace crfv
