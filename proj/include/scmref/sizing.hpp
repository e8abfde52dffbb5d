#pragma once

// Transistor sizing from a solved design point.
//
// ACM route (steps a-e):
//   a) V_X from the beta-multiplier relation;
//   b) i_f2, i_f1 = alpha i_f2, S_IREF, and S_2 from I_REF = I_SQ2 i_f2 S_2 / N;
//   c) beta, then S_1 / S_2 = (I_SQ2 / I_SQ1) ((1 + M + N) / N) / (alpha - beta);
//   d) S_6, S_7 of the weak-inversion beta-multiplier pair;
//   e) mirror devices S_3..S_5, S_10.
// The lookup-table route replaces b)-c) by a gate-voltage sweep on a DeviceLUT.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/bias_generator.hpp"
#include "scmref/errors.hpp"
#include "scmref/lut.hpp"
#include "scmref/metrics.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/root_finding.hpp"
#include "scmref/tech.hpp"

namespace scmref {

/// Headroom terms of the minimum supply voltage [V].
struct VoltageBudget {
  double vds_sat = 0.0;
  double vsg1 = 0.0;
  double vsg2 = 0.0;
  double vsg7 = 0.0;
  std::optional<double> vsg8;  // absent when the bias generator is not sized
  double vgs4 = 0.0;
  double vsd6c_sat = 0.0;
};

/// V_DS,sat + max(V_SG1, V_SG8 + V_SG1 - V_SG2, V_GS4 + V_SD6C,sat + V_SG1 - V_SG2, V_SG7).
inline double vdd_min(double vds_sat, double vsg1, double vsg2, double vsg7, double vsg8, double vgs4,
                      double vsd6c_sat) {
  for (double v : {vds_sat, vsg1, vsg2, vsg7, vsg8, vgs4, vsd6c_sat}) {
    if (!(v >= 0.0)) throw DomainError("vdd_min: voltage terms must be >= 0");
  }
  return vds_sat + std::max({vsg1, vsg8 + vsg1 - vsg2, vgs4 + vsd6c_sat + vsg1 - vsg2, vsg7});
}

inline double vdd_min(const VoltageBudget& b) {
  if (b.vsg8) return vdd_min(b.vds_sat, b.vsg1, b.vsg2, b.vsg7, *b.vsg8, b.vgs4, b.vsd6c_sat);
  return b.vds_sat + std::max({b.vsg1, b.vgs4 + b.vsd6c_sat + b.vsg1 - b.vsg2, b.vsg7});
}

struct SizingOptions {
  double i_f6 = 0.03;       // M6 inversion level (weak inversion)
  double mirror_if = 0.69;  // mirror inversion level
  std::optional<BiasGenSizing> bias;

  /// Defaults for FDSOI-like profiles.
  static SizingOptions fdsoi() { return {0.003, 0.25, std::nullopt}; }
  /// Defaults for bulk-like profiles.
  static SizingOptions bulk() { return {0.03, 0.69, std::nullopt}; }
};

struct SizingResult {
  std::string method;  // "acm" or "lut"
  double alpha = 0.0;
  double beta = 0.0;
  double i_f1 = 0.0;
  double i_f2 = 0.0;
  double i_r1 = 0.0;
  double i_f6 = 0.0;
  double i_f7 = 0.0;
  double mirror_if = 0.0;

  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
  double s5 = 0.0;
  double s6 = 0.0;
  double s7 = 0.0;
  double s10 = 0.0;
  std::optional<double> s8;
  std::optional<double> s9;

  double n_ratio = 1.0;
  double m_ratio = 1.0;
  double isq_ratio_21 = 1.0;  // I_SQ2 / I_SQ1
  double delta_vt = 0.0;
  double v_x = 0.0;
  double s_iref = 0.0;
  double i_ref = 0.0;
  double v_g = 0.0;  // SCM gate voltage above the M1 source [V]

  VoltageBudget budget;
  double v_dd_min = 0.0;

  /// Relative mismatch of S_1 / S_2 against the KCL aspect-ratio relation.
  double kcl_relative_error() const {
    const double expected = isq_ratio_21 * ((1.0 + m_ratio + n_ratio) / n_ratio) / (alpha - beta);
    return std::abs(s1 / s2 - expected) / expected;
  }
};

namespace detail {

inline void check_sizing_inputs(const DesignPoint& design, const SizingOptions& opt) {
  design.validate();
  if (!(design.n_ratio > 0.0)) throw DomainError("sizing: N must be > 0");
  if (!(design.i_ref_target > 0.0)) throw DomainError("sizing: target I_REF must be > 0");
  if (!(opt.i_f6 > 0.0 && opt.i_f6 <= 0.1)) throw DomainError("sizing: i_f6 must lie in (0, 0.1]");
  if (!(opt.mirror_if > 0.0)) throw DomainError("sizing: mirror inversion level must be > 0");
}

inline void check_degenerate(double alpha, double beta) {
  if (!(alpha - beta > 1e-6)) {
    throw DegenerateDesign("sizing: alpha - beta = " + std::to_string(alpha - beta) +
                           " is near zero, S1/S2 diverges");
  }
}

/// Steps d) and e), the bias-generator sizes and the supply budget.
inline void size_periphery(SizingResult& r, const DesignPoint& design, const TechProfile& tech,
                           const SizingOptions& opt, Temperature t) {
  const double u_t = acm::thermal_voltage(t);
  const double isq_w = acm::scale_isq(tech.isq_weak_ref(), tech, t);
  const double i_ref = design.i_ref_target;
  const double vt0 = tech.vt0 + tech.vt0_tempco * (t.kelvin() - tech.t_ref.kelvin());

  // M6 carries I_REF, the diode M7 carries J I_REF, and S_6 = K S_7.
  r.i_f6 = opt.i_f6;
  r.s6 = i_ref / (isq_w * opt.i_f6);
  r.s7 = r.s6 / design.k_ratio;
  r.i_f7 = design.j_ratio * i_ref / (isq_w * r.s7);

  r.mirror_if = opt.mirror_if;
  r.s4 = i_ref / (isq_w * opt.mirror_if);
  r.s3 = design.n_ratio * r.s4;
  r.s5 = design.j_ratio * r.s4;
  r.s10 = design.m_ratio * r.s4;

  VoltageBudget& b = r.budget;
  b.vsg2 = r.v_g - r.v_x;
  b.vsg1 = r.v_g;
  b.vsg7 = acm::vgs_of_if(vt0, tech.n, u_t, r.i_f7);
  b.vgs4 = acm::vgs_of_if(vt0, tech.n, u_t, opt.mirror_if);
  b.vds_sat = acm::vds_sat(u_t, opt.mirror_if);
  b.vsd6c_sat = acm::vds_sat(u_t, opt.i_f6);
  if (opt.bias) {
    opt.bias->validate();
    r.s8 = opt.bias->s8;
    r.s9 = opt.bias->s9;
    b.vsg8 = vsg_weak_inversion(opt.bias->flavor8, opt.bias->branch_current, opt.bias->s8, tech, t);
  }
  r.v_dd_min = vdd_min(b);
}

}  // namespace detail

/// ACM sizing from an operating point solved at the sizing temperature.
inline SizingResult size_acm(const DesignPoint& design, const TechProfile& tech, const OperatingPoint& op,
                             const SizingOptions& opt = {}) {
  detail::check_sizing_inputs(design, opt);
  const Temperature t = op.temperature;
  const double u_t = acm::thermal_voltage(t);
  if (std::abs(op.i_f1 / op.i_f2 - design.alpha) > 1e-9 * design.alpha) {
    throw DomainError("size_acm: operating point does not match the design's alpha");
  }
  SizingResult r;
  r.method = "acm";
  r.alpha = design.alpha;
  r.n_ratio = design.n_ratio;
  r.m_ratio = design.m_ratio;
  r.delta_vt = op.delta_vt;
  r.i_ref = design.i_ref_target;

  // a)
  r.v_x = vx_beta_multiplier(design.k_ptat, op.delta_vt, tech.n, u_t);
  // b)
  r.i_f2 = op.i_f2;
  r.i_f1 = design.alpha * r.i_f2;
  r.s_iref = s_iref_closed_form(r.i_f2, design.alpha, tech.n, u_t);
  const double isq2 = acm::scale_isq(tech.isq_m2_ref(), tech, t);
  const double isq1 = acm::scale_isq(tech.isq_m1_ref(), tech, t);
  r.s2 = design.n_ratio * design.i_ref_target / (isq2 * r.i_f2);
  // c)
  r.beta = beta_from_vx(r.v_x, r.i_f2, tech.n, u_t);
  r.i_r1 = r.beta * r.i_f2;
  detail::check_degenerate(r.alpha, r.beta);
  r.isq_ratio_21 = isq2 / isq1;
  r.s1 = r.s2 * r.isq_ratio_21 * ((1.0 + design.m_ratio + design.n_ratio) / design.n_ratio) /
         (r.alpha - r.beta);

  const double vt0 = tech.vt0 + tech.vt0_tempco * (t.kelvin() - tech.t_ref.kelvin());
  r.v_g = acm::vgs_of_if(vt0, tech.n, u_t, r.i_f1);
  // d), e)
  detail::size_periphery(r, design, tech, opt, t);
  return r;
}

inline SizingResult size_acm(const DesignPoint& design, const TechProfile& tech, const SizingOptions& opt = {},
                             Temperature t = reference_temperature()) {
  return size_acm(design, tech, operating_point(design, tech, t, 1.0), opt);
}

/// Lookup-table sizing of M1-M2.
///
/// The SCM gate voltage V_G is swept with the intermediate node held at V_X
/// until the forward-current ratio f(V_G, 0) / f(V_G - V_X, 0) equals alpha
/// (M2's body is tied to its source). Then
///   W_2 = N I_REF / f(V_G - V_X, 0),
///   W_1 = (1 + M + N) I_REF / (f(V_G, 0) - f(V_G, V_X)).
/// Inversion levels are read back from the table's g_m / I_D.
inline SizingResult size_lut(const DesignPoint& design, const TechProfile& tech, const DeviceLUT& lut,
                             const SizingOptions& opt = {}, Temperature t = reference_temperature()) {
  detail::check_sizing_inputs(design, opt);
  const double u_t = acm::thermal_voltage(t);
  SizingResult r;
  r.method = "lut";
  r.n_ratio = design.n_ratio;
  r.m_ratio = design.m_ratio;
  r.delta_vt = design.delta_vt;
  r.i_ref = design.i_ref_target;
  r.v_x = vx_beta_multiplier(design.k_ptat, design.delta_vt, tech.n, u_t);

  const auto& vg = lut.vg_grid();
  const auto& vs = lut.vs_grid();
  if (!(vs.front() <= 0.0 && vs.back() >= r.v_x)) {
    throw DomainError("size_lut: LUT source-voltage grid does not cover [0, V_X = " + std::to_string(r.v_x) + " V]");
  }
  const double vg_lo = vg.front() + r.v_x;
  const double vg_hi = vg.back();
  if (!(vg_hi > vg_lo)) throw DomainError("size_lut: LUT gate-voltage span is narrower than V_X");

  auto fwd_ratio = [&](double g) { return lut.id_per_w(g, 0.0) / lut.id_per_w(g - r.v_x, 0.0); };
  auto residual = [&](double g) { return fwd_ratio(g) - design.alpha; };

  // Scan the table's own gate grid for the crossing, then refine.
  std::vector<double> probes{vg_lo};
  for (double g : vg) {
    if (g > vg_lo && g < vg_hi) probes.push_back(g);
  }
  probes.push_back(vg_hi);
  std::optional<std::pair<double, double>> bracket;
  for (std::size_t k = 1; k < probes.size(); ++k) {
    if ((residual(probes[k - 1]) > 0.0) != (residual(probes[k]) > 0.0)) {
      bracket = std::pair{probes[k - 1], probes[k]};
      break;
    }
  }
  if (!bracket) {
    throw DomainError("size_lut: no gate voltage in the LUT reaches alpha = " + std::to_string(design.alpha) +
                      " (non-bracketed crossing)");
  }
  numeric::RootOptions ropt;
  ropt.abs_residual = 1e-13 * design.alpha;
  r.v_g = numeric::find_root(residual, bracket->first, bracket->second, ropt);

  const double f_m2 = lut.id_per_w(r.v_g - r.v_x, 0.0);
  const double f_m1_fwd = lut.id_per_w(r.v_g, 0.0);
  const double f_m1_rev = lut.id_per_w(r.v_g, r.v_x);
  r.alpha = f_m1_fwd / f_m2;
  r.beta = f_m1_rev / f_m2;
  detail::check_degenerate(r.alpha, r.beta);
  r.isq_ratio_21 = 1.0;

  const double w2 = design.n_ratio * design.i_ref_target / f_m2;
  const double w1 = (1.0 + design.m_ratio + design.n_ratio) * design.i_ref_target / (f_m1_fwd - f_m1_rev);
  r.s2 = w2 / lut.length();
  r.s1 = w1 / lut.length();

  r.i_f2 = acm::if_of_gm_over_id(tech.n, u_t, lut.gm_over_id(r.v_g - r.v_x, 0.0));
  r.i_f1 = r.alpha * r.i_f2;
  r.i_r1 = r.beta * r.i_f2;
  r.s_iref = s_iref_closed_form(r.i_f2, r.alpha, tech.n, u_t);

  detail::size_periphery(r, design, tech, opt, t);
  return r;
}

}  // namespace scmref
