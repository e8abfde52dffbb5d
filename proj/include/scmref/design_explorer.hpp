#pragma once

// (K_PTAT, alpha) exploration: TC maps, TC-valley extraction, the affine
// valley fit and the alpha predictor used to seed the sizing loop.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/errors.hpp"
#include "scmref/metrics.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/root_finding.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

inline constexpr double kInfeasibleTc = std::numeric_limits<double>::infinity();

/// Box TC [ppm/degC] of I_REF for a (alpha, K_PTAT) pair; +inf when the
/// equilibrium does not exist somewhere on the grid. I_REF is scale-free
/// here, so S_2/N is fixed to 1.
inline double tc_of(const TechProfile& tech, double delta_vt, double alpha, double k_ptat,
                    const std::vector<Temperature>& grid) {
  BoxSeries s;
  s.axis.reserve(grid.size());
  s.values.reserve(grid.size());
  try {
    for (const auto& t : grid) {
      const double i_f2 = solve_if2_raw(alpha, k_ptat, delta_vt, tech.n, acm::thermal_voltage(t));
      s.axis.push_back(t.celsius());
      s.values.push_back(acm::isq_at(tech, t) * i_f2);
    }
  } catch (const InfeasibleDesign&) {
    return kInfeasibleTc;
  }
  return box_tc(s);
}

/// S_IREF [1/V] at 25 degC; NaN when infeasible.
inline double s_iref_of(const TechProfile& tech, double delta_vt, double alpha, double k_ptat) {
  const double u_t = acm::thermal_voltage(reference_temperature());
  try {
    const double i_f2 = solve_if2_raw(alpha, k_ptat, delta_vt, tech.n, u_t);
    return s_iref_closed_form(i_f2, alpha, tech.n, u_t);
  } catch (const InfeasibleDesign&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct TcCell {
  double alpha = 0.0;
  double k_ptat = 0.0;
  double tc = kInfeasibleTc;  // [ppm/degC]
  double s_iref = 0.0;        // [1/V]
  bool feasible = false;
};

struct TcMap {
  std::vector<double> alphas;
  std::vector<double> k_ptats;
  std::vector<TcCell> cells;  // alpha-major

  const TcCell& at(std::size_t ia, std::size_t ik) const { return cells[ia * k_ptats.size() + ik]; }
};

inline TcMap grid_tc_map(const TechProfile& tech, double delta_vt, const std::vector<double>& alphas,
                         const std::vector<double>& k_ptats, const std::vector<Temperature>& grid) {
  if (alphas.empty() || k_ptats.empty()) throw DomainError("grid_tc_map: empty alpha or K_PTAT range");
  require_increasing(grid, "grid_tc_map");
  TcMap map{alphas, k_ptats, {}};
  map.cells.reserve(alphas.size() * k_ptats.size());
  for (double a : alphas) {
    for (double k : k_ptats) {
      TcCell c;
      c.alpha = a;
      c.k_ptat = k;
      c.tc = tc_of(tech, delta_vt, a, k, grid);
      c.feasible = std::isfinite(c.tc);
      c.s_iref = c.feasible ? s_iref_of(tech, delta_vt, a, k) : std::numeric_limits<double>::quiet_NaN();
      map.cells.push_back(c);
    }
  }
  return map;
}

struct ValleyPoint {
  double alpha = 0.0;
  double k_ptat_opt = 0.0;
  double tc = 0.0;      // [ppm/degC]
  double s_iref = 0.0;  // [1/V]
  bool boundary = false;
};

struct ValleyOptions {
  double k_lo = 1.0;
  double k_hi = 100.0;
  std::size_t coarse_points = 41;
  std::size_t dense_points = 401;
  double rel_tol = 1e-4;
};

namespace detail {

inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = std::exp(llo + (lhi - llo) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  return out;
}

inline std::size_t count_local_minima(const std::vector<double>& v) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) continue;
    const bool left = k == 0 || !(v[k - 1] < v[k]);
    const bool right = k + 1 == v.size() || !(v[k + 1] < v[k]);
    if (left && right && (k == 0 || v[k - 1] != v[k])) ++n;
  }
  return n;
}

/// Coarse scan + golden-section refinement of f over ln(x) in [lo, hi].
template <class Fn>
std::pair<double, bool> minimize_log(Fn&& f, double lo, double hi, std::size_t coarse, std::size_t dense,
                                     double rel_tol) {
  auto xs = log_grid(lo, hi, coarse);
  std::vector<double> ys(xs.size());
  std::transform(xs.begin(), xs.end(), ys.begin(), f);
  if (count_local_minima(ys) != 1) {
    xs = log_grid(lo, hi, dense);
    ys.resize(xs.size());
    std::transform(xs.begin(), xs.end(), ys.begin(), f);
  }
  const auto it = std::min_element(ys.begin(), ys.end());
  if (!std::isfinite(*it)) throw InfeasibleDesign("no feasible point in the scanned range");
  const auto j = static_cast<std::size_t>(it - ys.begin());
  if (j == 0 || j + 1 == xs.size()) return {xs[j], true};
  auto g = [&](double u) { return f(std::exp(u)); };
  const auto [u, fu] = numeric::golden_section(g, std::log(xs[j - 1]), std::log(xs[j + 1]), rel_tol);
  return {fu <= ys[j] ? std::exp(u) : xs[j], false};
}

}  // namespace detail

/// K_PTAT minimising the I_REF TC at fixed alpha.
inline ValleyPoint valley_for_alpha(const TechProfile& tech, double delta_vt, double alpha,
                                    const std::vector<Temperature>& grid = default_temperature_grid(),
                                    const ValleyOptions& opt = {}) {
  auto f = [&](double k) { return tc_of(tech, delta_vt, alpha, k, grid); };
  const auto [k, boundary] = detail::minimize_log(f, opt.k_lo, opt.k_hi, opt.coarse_points, opt.dense_points,
                                                  opt.rel_tol * 0.5);
  return {alpha, k, f(k), s_iref_of(tech, delta_vt, alpha, k), boundary};
}

/// alpha minimising the I_REF TC at fixed K_PTAT within [alpha_lo, alpha_hi].
inline ValleyPoint tc_optimal_alpha(const TechProfile& tech, double delta_vt, double k_ptat, double alpha_lo,
                                    double alpha_hi,
                                    const std::vector<Temperature>& grid = default_temperature_grid(),
                                    std::size_t coarse_points = 41, double rel_tol = 1e-6) {
  if (!(alpha_lo > 1.0) || !(alpha_hi > alpha_lo)) throw DomainError("tc_optimal_alpha: bad alpha range");
  auto f = [&](double a) { return tc_of(tech, delta_vt, a, k_ptat, grid); };
  const auto [a, boundary] = detail::minimize_log(f, alpha_lo, alpha_hi, coarse_points, 10 * coarse_points, rel_tol);
  return {a, k_ptat, f(a), s_iref_of(tech, delta_vt, a, k_ptat), boundary};
}

/// K_PTAT = slope * alpha + offset.
struct ValleyFit {
  double slope = 0.0;
  double offset = 0.0;
  double r_squared = 0.0;

  double k_ptat_at(double alpha) const { return slope * alpha + offset; }
};

inline ValleyFit fit_valley(const std::vector<ValleyPoint>& points) {
  if (points.size() < 3) throw DomainError("fit_valley: need at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : points) {
    sx += p.alpha;
    sy += p.k_ptat_opt;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : points) {
    sxx += (p.alpha - mx) * (p.alpha - mx);
    sxy += (p.alpha - mx) * (p.k_ptat_opt - my);
    syy += (p.k_ptat_opt - my) * (p.k_ptat_opt - my);
  }
  if (!(sxx > 1e-12 * (1.0 + mx * mx))) throw DomainError("fit_valley: alpha values are degenerate");
  ValleyFit fit;
  fit.slope = sxy / sxx;
  fit.offset = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.k_ptat_opt - fit.k_ptat_at(p.alpha);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

/// Inverse of the valley fit: alpha_guess = (K_PTAT - offset) / slope.
inline double guess_alpha(double k_ptat, const ValleyFit& fit) {
  if (!(fit.slope > 0.0)) throw DomainError("guess_alpha: fit slope must be > 0");
  const double a = (k_ptat - fit.offset) / fit.slope;
  if (!(k_ptat >= fit.offset) || !(a > 1.0)) {
    throw InfeasibleDesign("guess_alpha: K_PTAT = " + std::to_string(k_ptat) + " lies below the valley (alpha <= 1)");
  }
  return a;
}

/// Valley points over a list of alphas; boundary minima are kept but flagged.
inline std::vector<ValleyPoint> trace_valley(const TechProfile& tech, double delta_vt,
                                             const std::vector<double>& alphas,
                                             const std::vector<Temperature>& grid = default_temperature_grid(),
                                             const ValleyOptions& opt = {}) {
  std::vector<ValleyPoint> pts;
  pts.reserve(alphas.size());
  for (double a : alphas) pts.push_back(valley_for_alpha(tech, delta_vt, a, grid, opt));
  return pts;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) return {lo};
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace scmref
