#pragma once

// Line sensitivity of V_X and I_REF, the SCM small-signal resistance and the
// output-buffer dominant pole. Conductances are user inputs (typically
// extracted from simulation).

#include <cmath>

#include "scmref/acm.hpp"
#include "scmref/constants.hpp"
#include "scmref/errors.hpp"

namespace scmref {

struct SmallSignalSet {
  double gm6 = 0.0;   // [S]
  double gm6c = 0.0;  // cascode device [S]
  double gd5 = 0.0;
  double gd6 = 0.0;
  double gm8 = 0.0;
  double gd8 = 0.0;
  double j_ratio = 1.0;
  double c_f = 0.0;     // [F]
  double av_ota = 1.0;

  void validate() const {
    for (double g : {gm6, gm6c, gm8}) {
      if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("small-signal set: transconductances must be > 0");
    }
    for (double g : {gd5, gd6, gd8}) {
      if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("small-signal set: output conductances must be >= 0");
    }
    if (!(j_ratio > 0.0)) throw DomainError("small-signal set: J must be > 0");
    if (!(c_f > 0.0)) throw DomainError("small-signal set: C_F must be > 0");
    if (!(av_ota >= 1.0)) throw DomainError("small-signal set: A_v,OTA must be >= 1");
  }
};

/// r_SCM = 1 / (I_REF S_IREF).
inline double r_scm(double i_ref, double s_iref) {
  if (!(i_ref > 0.0) || !(s_iref > 0.0)) throw DomainError("r_scm: I_REF and S_IREF must be > 0");
  return 1.0 / (i_ref * s_iref);
}

/// dV_X / dV_DD without cascode: (g_d5 / J + g_d6) / g_m6.
inline double ls_vx_basic(const SmallSignalSet& ss) {
  ss.validate();
  return (ss.gd5 / ss.j_ratio + ss.gd6) / ss.gm6;
}

/// Cascoded form (g_d5 / J) / g_m6.
inline double ls_vx_cascoded(const SmallSignalSet& ss) {
  ss.validate();
  return (ss.gd5 / ss.j_ratio) / ss.gm6;
}

/// Cascoded form keeping the g_d6 / (g_m6c r_SCM) denominator term.
inline double ls_vx_cascoded_full(const SmallSignalSet& ss, double r_scm_ohm) {
  ss.validate();
  if (!(r_scm_ohm > 0.0)) throw DomainError("ls_vx_cascoded_full: r_SCM must be > 0");
  return (ss.gd5 / ss.j_ratio) / (ss.gm6 + ss.gd6 / (ss.gm6c * r_scm_ohm));
}

/// Relative LS of I_REF [%/V] from the absolute LS of V_X [V/V] and S_IREF [1/V].
inline double ls_iref(double ls_vx, double s_iref) {
  if (!(ls_vx >= 0.0) || !(s_iref >= 0.0)) throw DomainError("ls_iref: inputs must be >= 0");
  return s_iref * ls_vx * 100.0;
}

/// f_pd = (g_m8 + g_d8) / (2 pi C_F A_v,OTA) [Hz].
inline double dominant_pole(const SmallSignalSet& ss) {
  ss.validate();
  return (ss.gm8 + ss.gd8) / (2.0 * constants::pi * ss.c_f * ss.av_ota);
}

/// Approximate weak-inversion g_m = I / (n U_T).
inline double estimate_gm_weak(double i_d, double n, double u_t) {
  if (!(i_d > 0.0) || !(n > 0.0) || !(u_t > 0.0)) throw DomainError("estimate_gm_weak: inputs must be > 0");
  return i_d / (n * u_t);
}

}  // namespace scmref
