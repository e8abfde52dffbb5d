#pragma once

#include <stdexcept>
#include <string>

namespace scmref {

/// Argument outside the mathematical domain of a model equation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A root finder or optimizer did not converge. Carries the last bracket.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " (bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// The design parameters admit no equilibrium (e.g. the beta-multiplier
/// voltage cannot be reached by the self-cascode for any inversion level).
class InfeasibleDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// beta fell below its floor: M1 is effectively saturated.
class SaturatedDevice : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// alpha - beta vanishes and the aspect-ratio relation blows up.
class DegenerateDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (config, CSV, LUT).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scmref
