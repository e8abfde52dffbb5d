#pragma once

// Self-cascode + beta-multiplier equilibrium.
//
// The beta-multiplier imposes V_X = n U_T ln(K_PTAT) + dV_T; the self-cascode
// (M1, M2) produces V_X = n U_T [G(alpha i_f2) - G(i_f2)] with
// G(i) = sqrt(1+i) + ln(sqrt(1+i) - 1). Equating both gives i_f2(T), and
// I_REF = I_SQ2(T) i_f2(T) (S_2 / N).

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/errors.hpp"
#include "scmref/leakage.hpp"
#include "scmref/metrics.hpp"
#include "scmref/root_finding.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

/// Free design parameters of the reference.
struct DesignPoint {
  double alpha = 2.9;         // i_f1 / i_f2
  double k_ptat = 6.0;        // J K
  double n_ratio = 1.0;       // N, M3:M4 mirror ratio
  double m_ratio = 1.0;       // M, bias-generator branch ratio
  double j_ratio = 1.0;       // J
  double k_ratio = 6.0;       // K
  double delta_vt = 0.02;     // CWT offset [V]
  double i_ref_target = 1.25e-9;  // [A]

  /// Design with J = 1, K = K_PTAT.
  static DesignPoint make(double alpha, double k_ptat, double delta_vt) {
    DesignPoint d;
    d.alpha = alpha;
    d.k_ptat = k_ptat;
    d.j_ratio = 1.0;
    d.k_ratio = k_ptat;
    d.delta_vt = delta_vt;
    return d;
  }

  void validate() const {
    if (!(alpha > 1.0)) throw DomainError("design: alpha must be > 1");
    if (!(k_ptat >= 1.0)) throw DomainError("design: k_ptat must be >= 1");
    if (std::abs(j_ratio * k_ratio - k_ptat) > 1e-9 * k_ptat) {
      throw DomainError("design: k_ptat must equal j_ratio * k_ratio");
    }
    if (!(n_ratio >= 0.0) || !(m_ratio >= 0.0)) throw DomainError("design: N, M must be >= 0");
    if (!(delta_vt >= 0.0)) throw DomainError("design: delta_vt must be >= 0");
  }
};

/// Solved state at one temperature.
struct OperatingPoint {
  Temperature temperature = reference_temperature();
  double i_f2 = 0.0;
  double i_f1 = 0.0;
  double i_r1 = 0.0;
  double beta = 0.0;
  double v_x = 0.0;     // [V]
  double i_ref = 0.0;   // [A]
  double s_iref = 0.0;  // [1/V]
  double delta_vt = 0.0;  // offset actually applied at this point [V]
};

namespace detail {

/// G(a i) - G(i) for a > 0, evaluated without cancellation.
inline double scm_difference(double i, double a) {
  const double sa = std::sqrt(1.0 + a * i);
  const double s1 = std::sqrt(1.0 + i);
  return (a - 1.0) * i / (sa + s1) + std::log(a) + std::log((s1 + 1.0) / (sa + 1.0));
}

}  // namespace detail

/// V_X from the self-cascode side (M1 forward level alpha i_f2).
inline double vx_scm(double i_f2, double alpha, double n, double u_t) {
  if (!(i_f2 > 0.0)) throw DomainError("vx_scm: i_f2 must be > 0");
  if (!(alpha > 1.0)) throw DomainError("vx_scm: alpha must be > 1");
  return n * u_t * detail::scm_difference(i_f2, alpha);
}

/// beta = i_r1 / i_f2 solving
/// V_X (n - 1) = n U_T [G(i_f2) - G(beta i_f2)].
inline double beta_from_vx(double v_x, double i_f2, double n, double u_t) {
  if (!(v_x >= 0.0)) throw DomainError("beta_from_vx: v_x must be >= 0");
  if (!(i_f2 > 0.0)) throw DomainError("beta_from_vx: i_f2 must be > 0");
  if (v_x == 0.0) return 1.0;
  constexpr double beta_floor = 1e-9;
  const double target = v_x * (n - 1.0) / (n * u_t);
  // G(i_f2) - G(beta i_f2) = scm_difference(beta i_f2, 1/beta), decreasing in beta.
  auto residual = [&](double log_beta) {
    const double b = std::exp(log_beta);
    return detail::scm_difference(b * i_f2, 1.0 / b) - target;
  };
  const double lo = std::log(beta_floor);
  if (residual(lo) < 0.0) {
    throw SaturatedDevice("beta_from_vx: required beta below 1e-9, M1 effectively saturated");
  }
  numeric::RootOptions opt;
  opt.abs_residual = 1e-15;
  return std::exp(numeric::find_root(residual, lo, 0.0, opt));
}

/// V_X imposed by the beta-multiplier: n U_T ln(K_PTAT) + dV_T.
inline double vx_beta_multiplier(double k_ptat, double delta_vt, double n, double u_t) {
  if (!(k_ptat >= 1.0)) throw DomainError("vx_beta_multiplier: k_ptat must be >= 1");
  if (!(delta_vt >= 0.0)) throw DomainError("vx_beta_multiplier: delta_vt must be >= 0");
  return n * u_t * std::log(k_ptat) + delta_vt;
}

/// i_f2 such that G(alpha i_f2) - G(i_f2) = ln(K_PTAT) + dV_T / (n U_T).
///
/// The left side increases from ln(alpha) (i_f2 -> 0) to infinity, so a
/// design is infeasible when the right side does not exceed ln(alpha).
inline double solve_if2_raw(double alpha, double k_ptat, double delta_vt, double n, double u_t) {
  if (!(alpha > 1.0)) throw DomainError("solve_if2: alpha must be > 1");
  if (!(k_ptat >= 1.0)) throw DomainError("solve_if2: k_ptat must be >= 1");
  const double rhs = std::log(k_ptat) + delta_vt / (n * u_t);
  if (!(rhs > std::log(alpha))) {
    throw InfeasibleDesign("infeasible design: ln(K_PTAT) + dVT/(n U_T) = " + std::to_string(rhs) +
                           " does not exceed ln(alpha) = " + std::to_string(std::log(alpha)));
  }
  auto residual = [&](double u) { return detail::scm_difference(std::exp(u), alpha) - rhs; };
  double lo = std::log(1e-9);
  double hi = std::log(1e5);
  while (residual(lo) > 0.0) {
    lo -= 20.0;
    if (lo < -690.0) throw SolverError("solve_if2: lower bracket exhausted", 0.0, std::exp(hi));
  }
  while (residual(hi) < 0.0) {
    hi += 5.0;
    if (hi > 690.0) throw SolverError("solve_if2: upper bracket exhausted", std::exp(lo), HUGE_VAL);
  }
  numeric::RootOptions opt;
  opt.abs_residual = 1e-14;
  return std::exp(numeric::find_root(residual, lo, hi, opt));
}

inline double solve_if2(const DesignPoint& design, const TechProfile& tech, Temperature t) {
  return solve_if2_raw(design.alpha, design.k_ptat, design.delta_vt, tech.n, acm::thermal_voltage(t));
}

/// I_REF = I_SQ2(T) i_f2(T) (S_2 / N).
inline double reference_current(const DesignPoint& design, const TechProfile& tech, Temperature t,
                                double s2_over_n) {
  return acm::isq_at(tech, t) * solve_if2(design, tech, t) * s2_over_n;
}

/// Full operating point at a given offset (dV_T may differ from the design's
/// nominal value, e.g. a temperature-dependent offset law).
inline OperatingPoint operating_point_at_offset(const DesignPoint& design, const TechProfile& tech,
                                                Temperature t, double s2_over_n, double delta_vt) {
  const double u_t = acm::thermal_voltage(t);
  OperatingPoint op;
  op.temperature = t;
  op.delta_vt = delta_vt;
  op.i_f2 = solve_if2_raw(design.alpha, design.k_ptat, delta_vt, tech.n, u_t);
  op.i_f1 = design.alpha * op.i_f2;
  op.v_x = vx_beta_multiplier(design.k_ptat, delta_vt, tech.n, u_t);
  op.beta = beta_from_vx(op.v_x, op.i_f2, tech.n, u_t);
  op.i_r1 = op.beta * op.i_f2;
  op.i_ref = acm::isq_at(tech, t) * op.i_f2 * s2_over_n;
  op.s_iref = s_iref_closed_form(op.i_f2, design.alpha, tech.n, u_t);
  return op;
}

inline OperatingPoint operating_point(const DesignPoint& design, const TechProfile& tech, Temperature t,
                                      double s2_over_n) {
  design.validate();
  return operating_point_at_offset(design, tech, t, s2_over_n, design.delta_vt);
}

struct SweepOptions {
  std::optional<LeakagePerturbation> leak;
  /// dV_T shift caused by the V_B6-node leakage current; default none.
  std::function<double(double leak_current)> vb6_leak_to_dvt;
  /// Temperature-dependent offset overriding design.delta_vt.
  std::function<double(Temperature)> delta_vt_law;
};

struct TemperatureSweep {
  std::vector<OperatingPoint> points;
  std::vector<double> i_ref_unperturbed;  // [A], before leakage subtraction
  std::vector<double> vb6_leak;           // [A], exposed for the bias generator
  double tc_ppm = 0.0;
  bool ptat_mode = false;

  BoxSeries i_ref_series() const {
    BoxSeries s;
    for (const auto& p : points) {
      s.axis.push_back(p.temperature.celsius());
      s.values.push_back(p.i_ref);
    }
    return s;
  }
};

/// Operating points over a temperature grid plus the box-method TC.
///
/// With a leakage perturbation, the V_X-node leakage is subtracted from the
/// reference current and the V_B6-node leakage enters through dV_T.
inline TemperatureSweep temperature_sweep(const DesignPoint& design, const TechProfile& tech,
                                          const std::vector<Temperature>& grid, double s2_over_n,
                                          const SweepOptions& options = {}) {
  design.validate();
  require_increasing(grid, "temperature_sweep");
  TemperatureSweep sweep;
  sweep.ptat_mode = design.delta_vt == 0.0 && !options.delta_vt_law;
  sweep.points.reserve(grid.size());
  for (const auto& t : grid) {
    double dvt = options.delta_vt_law ? options.delta_vt_law(t) : design.delta_vt;
    double leak_vx = 0.0;
    double leak_vb6 = 0.0;
    if (options.leak) {
      leak_vx = options.leak->vx.at(t);
      leak_vb6 = options.leak->vb6.at(t);
      if (options.vb6_leak_to_dvt) dvt += options.vb6_leak_to_dvt(leak_vb6);
    }
    OperatingPoint op;
    try {
      op = operating_point_at_offset(design, tech, t, s2_over_n, dvt);
    } catch (const std::exception& e) {
      throw SolverError("temperature_sweep failed at " + std::to_string(t.celsius()) + " degC: " + e.what(),
                        t.celsius(), t.celsius());
    }
    sweep.i_ref_unperturbed.push_back(op.i_ref);
    op.i_ref -= leak_vx;
    if (!(op.i_ref > 0.0)) {
      throw SolverError("temperature_sweep: leakage exceeds the reference current at " +
                            std::to_string(t.celsius()) + " degC",
                        t.celsius(), t.celsius());
    }
    sweep.vb6_leak.push_back(leak_vb6);
    sweep.points.push_back(op);
  }
  sweep.tc_ppm = box_tc(sweep.i_ref_series());
  return sweep;
}

}  // namespace scmref
