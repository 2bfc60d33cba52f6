#pragma once

#include <stdexcept>
#include <string>

namespace sagnac {

// Drive profile never accumulates the required half-turn within its samples.
class insufficient_profile_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature could not reach the requested tolerance.
class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& what, double achieved_tol)
      : std::runtime_error(what + " (achieved tolerance " +
                           std::to_string(achieved_tol) + ")"),
        achieved_tol_(achieved_tol) {}
  double achieved_tolerance() const { return achieved_tol_; }

 private:
  double achieved_tol_;
};

// Basis-cutoff leakage exceeded the declared bound.
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested problem exceeds the hard size guard.
class capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite-difference step too small: cancellation dominates the estimate.
class step_size_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fringe extremum: the error-propagation estimator diverges here.
class insensitive_point_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation only defined for constant drives.
class unsupported_profile_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation only defined for the unit constant system.
class unsupported_configuration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimator has no information about the parameter (zero Fisher information).
class unidentifiable_parameter_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched vector dimensions.
class shape_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sagnac
