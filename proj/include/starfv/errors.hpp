#pragma once

#include <stdexcept>
#include <string>

namespace starfv {

// Bad parameters or arguments outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature could not reach its tolerance. Carries the best
// estimate and the error bound at the point it gave up.
class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// Evaluation at a pole (e.g. Q1 at xi = p).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A custom drift pushed the deterministic flow out of [0,1].
class DomainEscape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simulation exceeded a hard resource guard.
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The replacement skeleton chain is absorbing (no mutation), so the
// frequency process has no stationary law.
class NoStationaryDistribution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace starfv
