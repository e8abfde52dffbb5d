#pragma once

// ACM compact-model primitives: thermal voltage, specific sheet current
// temperature law, and the inversion-level <-> voltage relation.

#include <cmath>
#include <limits>
#include <string>

#include "scmref/constants.hpp"
#include "scmref/errors.hpp"
#include "scmref/root_finding.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref::acm {

/// k_B T / q [V].
inline double thermal_voltage(Temperature t) {
  return constants::boltzmann * t.kelvin() / constants::elementary_charge;
}

/// I_SQ(T) = isq_ref (T / t_ref)^(2 - m).
inline double scale_isq(double isq_ref, const TechProfile& tech, Temperature t) {
  return isq_ref * std::pow(t.kelvin() / tech.t_ref.kelvin(), 2.0 - tech.m);
}

inline double isq_at(const TechProfile& tech, Temperature t) {
  return scale_isq(tech.isq_ref, tech, t);
}

/// sqrt(1 + x) - 1, rationalized so that it stays accurate for x << 1.
inline double sqrt1p_m1(double x) { return x / (std::sqrt(1.0 + x) + 1.0); }

/// ln(sqrt(1 + x) - 1) = ln(x) - ln(sqrt(1 + x) + 1).
inline double log_sqrt1p_m1(double x) { return std::log(x) - std::log(std::sqrt(1.0 + x) + 1.0); }

/// F(i) = sqrt(1+i) - 2 + ln(sqrt(1+i) - 1), i.e. (V_P - V_S) / U_T.
inline double voltage_of_if(double i_f) {
  if (!(i_f > 0.0)) {
    throw DomainError("inversion level must be > 0, got " + std::to_string(i_f));
  }
  return std::sqrt(1.0 + i_f) - 2.0 + log_sqrt1p_m1(i_f);
}

/// dF/di = 1 / (2 (sqrt(1+i) - 1)).
inline double voltage_of_if_slope(double i_f) { return 0.5 / sqrt1p_m1(i_f); }

/// Inverse of voltage_of_if. |F(i) - v| < 1e-12 on return.
///
/// Solved on ln(i) by bracketed bisection + secant; the initial bracket
/// [1e-12, 1e4] is widened geometrically until it contains the root.
inline double if_of_voltage(double v) {
  if (!std::isfinite(v)) throw DomainError("if_of_voltage: v must be finite");
  double lo = std::log(1e-12);
  double hi = std::log(1e4);
  auto residual = [v](double u) { return voltage_of_if(std::exp(u)) - v; };
  int expansions = 0;
  while (residual(lo) > 0.0) {
    lo -= 2.0 * (hi - lo);
    if (++expansions > 8 || lo < std::log(std::numeric_limits<double>::min()) + 1.0) {
      throw SolverError("if_of_voltage: lower bracket exhausted", std::exp(lo), std::exp(hi));
    }
  }
  while (residual(hi) < 0.0) {
    hi += 2.0 * (hi - lo);
    if (++expansions > 8 || hi > 700.0) {
      throw SolverError("if_of_voltage: upper bracket exhausted", std::exp(lo), std::exp(hi));
    }
  }
  numeric::RootOptions opt;
  opt.abs_residual = 1e-14;
  return std::exp(numeric::find_root(residual, lo, hi, opt));
}

/// Gate-source voltage of a saturated device at inversion level i_f:
/// V_GS = V_T0 + n U_T F(i_f).
inline double vgs_of_if(double vt0, double n, double u_t, double i_f) {
  return vt0 + n * u_t * voltage_of_if(i_f);
}

/// ACM saturation-voltage estimate U_T (sqrt(1 + i_f) + 3).
inline double vds_sat(double u_t, double i_f) { return u_t * (std::sqrt(1.0 + i_f) + 3.0); }

/// Gate-referred g_m / I_D of a saturated device: 2 / (n U_T (1 + sqrt(1 + i_f))).
inline double gm_over_id(double n, double u_t, double i_f) {
  return 2.0 / (n * u_t * (1.0 + std::sqrt(1.0 + i_f)));
}

/// Inverse of gm_over_id.
inline double if_of_gm_over_id(double n, double u_t, double gm_id) {
  const double root = 2.0 / (n * u_t * gm_id) - 1.0;
  return root * root - 1.0;
}

}  // namespace scmref::acm
