#pragma once

// Design flow: fit the TC valley, guess alpha for the requested K_PTAT,
// evaluate the model over a bracket around the guess, keep the TC-minimizing
// alpha and size the circuit there.

#include <algorithm>
#include <cmath>
#include <vector>

#include "scmref/design_explorer.hpp"
#include "scmref/errors.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/root_finding.hpp"
#include "scmref/sizing.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

struct MethodologyOptions {
  std::vector<double> fit_alphas = linspace(2.0, 8.0, 7);
  double bracket_lo = 0.7;   // relative to alpha_guess
  double bracket_hi = 1.4;
  std::size_t bracket_points = 15;
  double widened_lo = 0.5;
  double widened_hi = 2.0;
  double alpha_rel_tol = 1e-6;
  std::vector<Temperature> grid = default_temperature_grid();
  ValleyOptions valley;
  SizingOptions sizing;
};

struct BracketSample {
  double alpha = 0.0;
  double tc = 0.0;  // [ppm/degC], +inf when infeasible
};

struct MethodologyResult {
  ValleyFit fit;
  std::vector<ValleyPoint> valley;  // interior points used by the fit
  double alpha_guess = 0.0;
  double tc_guess = 0.0;
  double alpha_sim = 0.0;
  double tc_sim = 0.0;
  bool widened = false;
  std::vector<BracketSample> bracket;
  DesignPoint design;
  SizingResult sizing;
};

inline MethodologyResult methodology_loop(const TechProfile& tech, const DesignPoint& target,
                                          const MethodologyOptions& opt = {}) {
  tech.validate();
  if (opt.bracket_points < 3) throw DomainError("methodology: bracket needs >= 3 points");
  if (!(opt.bracket_lo < 1.0 && opt.bracket_hi > 1.0)) throw DomainError("methodology: bracket must contain 1");
  const double dvt = target.delta_vt;
  const double k = target.k_ptat;

  MethodologyResult res;
  // Step 2: valley fit and alpha guess.
  for (const auto& p : trace_valley(tech, dvt, opt.fit_alphas, opt.grid, opt.valley)) {
    if (!p.boundary) res.valley.push_back(p);
  }
  res.fit = fit_valley(res.valley);
  res.alpha_guess = guess_alpha(k, res.fit);
  res.tc_guess = tc_of(tech, dvt, res.alpha_guess, k, opt.grid);

  // Step 3: bracket evaluation, widened once if the minimum sits on an edge.
  auto tc_at = [&](double a) { return tc_of(tech, dvt, a, k, opt.grid); };
  auto scan = [&](double rlo, double rhi) {
    const double lo = std::max(res.alpha_guess * rlo, 1.0 + 1e-9);
    const auto alphas = linspace(lo, res.alpha_guess * rhi, opt.bracket_points);
    std::vector<BracketSample> out;
    for (double a : alphas) out.push_back({a, tc_at(a)});
    return out;
  };
  auto argmin = [](const std::vector<BracketSample>& s) {
    return static_cast<std::size_t>(
        std::min_element(s.begin(), s.end(), [](const auto& x, const auto& y) { return x.tc < y.tc; }) - s.begin());
  };
  res.bracket = scan(opt.bracket_lo, opt.bracket_hi);
  std::size_t j = argmin(res.bracket);
  if (j == 0 || j + 1 == res.bracket.size()) {
    res.widened = true;
    res.bracket = scan(opt.widened_lo, opt.widened_hi);
    j = argmin(res.bracket);
    if (j == 0 || j + 1 == res.bracket.size()) {
      throw InfeasibleDesign("methodology: no interior TC minimum in the widened alpha bracket [" +
                             std::to_string(res.bracket.front().alpha) + ", " +
                             std::to_string(res.bracket.back().alpha) + "]");
    }
  }
  if (!std::isfinite(res.bracket[j].tc)) throw InfeasibleDesign("methodology: whole alpha bracket infeasible");
  const auto [a, tc] = numeric::golden_section(tc_at, res.bracket[j - 1].alpha, res.bracket[j + 1].alpha,
                                               opt.alpha_rel_tol);
  if (tc <= res.bracket[j].tc) {
    res.alpha_sim = a;
    res.tc_sim = tc;
  } else {
    res.alpha_sim = res.bracket[j].alpha;
    res.tc_sim = res.bracket[j].tc;
  }

  // Step 4: size at alpha_sim.
  res.design = target;
  res.design.alpha = res.alpha_sim;
  res.sizing = size_acm(res.design, tech, opt.sizing);
  return res;
}

}  // namespace scmref
