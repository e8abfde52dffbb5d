#pragma once

// Body / back-gate bias generator: the V_SG difference of two weak-inversion
// devices of different V_T flavors (M8, M9) sets V_SB6, which the body
// effect of M6 turns into the offset dV_T.

#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/errors.hpp"
#include "scmref/metrics.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

struct BiasGenSizing {
  double s8 = 1.0;
  double s9 = 1.0;
  DeviceFlavor flavor8;
  DeviceFlavor flavor9;
  double branch_current = 1.25e-9;  // [A], M I_REF

  void validate() const {
    if (!(s8 > 0.0) || !(s9 > 0.0)) throw DomainError("bias generator: aspect ratios must be > 0");
    if (!(branch_current > 0.0)) throw DomainError("bias generator: branch current must be > 0");
    flavor8.validate();
    flavor9.validate();
  }
};

/// Weak-inversion saturated device: V_SG = |V_T0(T)| + n U_T ln(I_SD / (I_SQ(T) S)).
inline double vsg_weak_inversion(const DeviceFlavor& flavor, double i_sd, double s, const TechProfile& tech,
                                 Temperature t) {
  if (!(i_sd > 0.0) || !(s > 0.0)) throw DomainError("vsg_weak_inversion: current and S must be > 0");
  const double isq = acm::scale_isq(flavor.isq_ref, tech, t);
  return flavor.vt0_at(t, tech.t_ref) + flavor.n * acm::thermal_voltage(t) * std::log(i_sd / (isq * s));
}

/// V_X - V_B6 = |V_T08(T) - V_T09(T)| + n U_T ln(I_SQ9 S_9 / (I_SQ8 S_8)), with
/// the technology's single n for both devices.
inline double vsb6_reference(const BiasGenSizing& sizing, const TechProfile& tech, Temperature t) {
  const double dvt0 = std::abs(sizing.flavor8.vt0_at(t, tech.t_ref) - sizing.flavor9.vt0_at(t, tech.t_ref));
  const double isq8 = acm::scale_isq(sizing.flavor8.isq_ref, tech, t);
  const double isq9 = acm::scale_isq(sizing.flavor9.isq_ref, tech, t);
  return dvt0 + tech.n * acm::thermal_voltage(t) * std::log(isq9 * sizing.s9 / (isq8 * sizing.s8));
}

/// FDSOI back-gate law: dV_T = gamma_b V_SB6.
inline double delta_vt_fdsoi(double gamma_b, double v_sb6) {
  if (!(v_sb6 >= 0.0)) throw DomainError("delta_vt_fdsoi: v_sb6 must be >= 0");
  return gamma_b * v_sb6;
}

/// Bulk square-root law: dV_T = gamma_b (sqrt(2 phi_fp) - sqrt(2 phi_fp - V_FBB)).
inline double delta_vt_bulk(double gamma_b_sqrt, double two_phi_f, double v_fbb) {
  if (!(v_fbb >= 0.0) || !(v_fbb < two_phi_f)) {
    throw DomainError("delta_vt_bulk: need 0 <= v_fbb < 2 phi_fp");
  }
  return gamma_b_sqrt * (std::sqrt(two_phi_f) - std::sqrt(two_phi_f - v_fbb));
}

struct FdsoiBody {};
struct BulkBody {};
using BodyModel = std::variant<FdsoiBody, BulkBody>;

/// dV_T produced by a given V_SB6 at temperature t.
inline double delta_vt_from_vsb6(const BodyModel& body, const TechProfile& tech, double v_sb6, Temperature t) {
  if (std::holds_alternative<FdsoiBody>(body)) return delta_vt_fdsoi(tech.body_factor_linear, v_sb6);
  return delta_vt_bulk(tech.body_factor_sqrt, tech.fermi_2phi_at(t), v_sb6);
}

struct DeltaVtCandidate {
  double ratio = 0.0;  // S_9 / S_8
  bool feasible = false;
  double tc_vsb6 = std::numeric_limits<double>::infinity();
  double tc_delta_vt = std::numeric_limits<double>::infinity();
};

struct DeltaVtTuning {
  double best_ratio = 0.0;
  std::vector<Temperature> grid;
  std::vector<double> vsb6;      // [V]
  std::vector<double> delta_vt;  // [V]
  double tc_vsb6 = 0.0;
  double tc_delta_vt = 0.0;
  std::vector<DeltaVtCandidate> candidates;

  /// Offset at temperature t, linearly interpolated over the grid (clamped).
  double delta_vt_at(Temperature t) const {
    const double x = t.kelvin();
    if (x <= grid.front().kelvin()) return delta_vt.front();
    if (x >= grid.back().kelvin()) return delta_vt.back();
    for (std::size_t k = 1; k < grid.size(); ++k) {
      if (x <= grid[k].kelvin()) {
        const double w = (x - grid[k - 1].kelvin()) / (grid[k].kelvin() - grid[k - 1].kelvin());
        return delta_vt[k - 1] + w * (delta_vt[k] - delta_vt[k - 1]);
      }
    }
    return delta_vt.back();
  }
};

/// Log-spaced candidate S_9 / S_8 ratios.
inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_spaced: bad range");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return out;
}

/// Step 1 of the sizing flow: pick the S_9 / S_8 ratio whose dV_T(T) has the
/// smallest box-method TC. `base` supplies flavors and branch current; its
/// s9 is overwritten by ratio * s8.
inline DeltaVtTuning minimize_delta_vt_tc(const std::vector<double>& ratios, const BiasGenSizing& base,
                                          const TechProfile& tech, const BodyModel& body,
                                          const std::vector<Temperature>& grid) {
  if (ratios.empty()) throw DomainError("minimize_delta_vt_tc: empty ratio sweep");
  require_increasing(grid, "minimize_delta_vt_tc");
  DeltaVtTuning best;
  best.grid = grid;
  best.tc_delta_vt = std::numeric_limits<double>::infinity();
  for (double ratio : ratios) {
    DeltaVtCandidate cand;
    cand.ratio = ratio;
    BiasGenSizing sz = base;
    sz.s9 = ratio * sz.s8;
    std::vector<double> vsb6;
    std::vector<double> dvt;
    try {
      for (const auto& t : grid) {
        const double v = vsb6_reference(sz, tech, t);
        vsb6.push_back(v);
        dvt.push_back(delta_vt_from_vsb6(body, tech, v, t));
      }
      BoxSeries sv{{}, vsb6};
      BoxSeries sd{{}, dvt};
      for (const auto& t : grid) {
        sv.axis.push_back(t.celsius());
        sd.axis.push_back(t.celsius());
      }
      cand.tc_vsb6 = box_tc(sv);
      cand.tc_delta_vt = box_tc(sd);
      cand.feasible = std::isfinite(cand.tc_delta_vt);
    } catch (const DomainError&) {
      cand.feasible = false;
    }
    best.candidates.push_back(cand);
    if (cand.feasible && cand.tc_delta_vt < best.tc_delta_vt) {
      best.best_ratio = ratio;
      best.vsb6 = vsb6;
      best.delta_vt = dvt;
      best.tc_vsb6 = cand.tc_vsb6;
      best.tc_delta_vt = cand.tc_delta_vt;
    }
  }
  if (best.vsb6.empty()) throw InfeasibleDesign("minimize_delta_vt_tc: every candidate ratio is infeasible");
  return best;
}

}  // namespace scmref
