#pragma once

// Box-method TC / LS, the closed-form sensitivity of I_REF to V_X, and the
// first-order variability estimate.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/errors.hpp"

namespace scmref {

/// Paired samples (x, value); x is a temperature or supply axis.
struct BoxSeries {
  std::vector<double> axis;
  std::vector<double> values;

  void validate() const {
    if (axis.size() != values.size()) throw DomainError("box series: axis/values length mismatch");
    if (axis.size() < 2) throw DomainError("box series: need at least 2 samples");
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) throw DomainError("box series: axis must be strictly increasing");
    }
  }
};

/// (max - min) / (mean * (x_max - x_min)). Mean is the arithmetic mean over
/// the samples.
inline double box_relative_slope(const BoxSeries& s) {
  s.validate();
  const double span = s.axis.back() - s.axis.front();
  if (!(span > 0.0)) throw DomainError("box series: degenerate axis");
  const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
  const double mean =
      std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(s.values.size());
  if (mean == 0.0) throw DomainError("box series: zero mean");
  return (*mx - *mn) / (std::abs(mean) * span);
}

/// Temperature coefficient [ppm/degC]; the axis may be in K or degC.
inline double box_tc(const BoxSeries& s) { return box_relative_slope(s) * 1e6; }

/// Line sensitivity [%/V] over a supply-voltage axis.
inline double box_ls(const BoxSeries& s) { return box_relative_slope(s) * 100.0; }

/// S_IREF = (1/I_REF) dI_REF/dV_X [1/V].
///
/// The bracket alpha/(sqrt(1+a i)-1) - 1/(sqrt(1+i)-1) is evaluated in the
/// rationalized form (sqrt(1+a i) - sqrt(1+i)) / i.
inline double s_iref_closed_form(double i_f2, double alpha, double n2, double u_t) {
  if (!(i_f2 > 0.0)) throw DomainError("s_iref: i_f2 must be > 0");
  if (!(alpha > 1.0)) throw DomainError("s_iref: alpha must be > 1");
  const double sa = std::sqrt(1.0 + alpha * i_f2);
  const double s1 = std::sqrt(1.0 + i_f2);
  const double bracket = (alpha - 1.0) / (sa + s1);  // (sa - s1) / i_f2
  return 2.0 / (i_f2 * n2 * u_t) / bracket;
}

/// 1/V -> %/mV.
inline double per_volt_to_pct_per_mv(double s) { return s * 0.1; }
inline double pct_per_mv_to_per_volt(double s) { return s * 10.0; }

struct VariabilityEstimate {
  double sigma_vx = 0.0;       // [V]
  double s_iref = 0.0;         // [1/V]
  double sigma_over_mu = 0.0;  // dimensionless
};

/// (sigma/mu) = S_IREF sigma_VX.
inline VariabilityEstimate first_order_variability(double sigma_vx, double s_iref) {
  if (!(sigma_vx >= 0.0) || !(s_iref >= 0.0)) {
    throw DomainError("first_order_variability: inputs must be >= 0");
  }
  return {sigma_vx, s_iref, s_iref * sigma_vx};
}

}  // namespace scmref
