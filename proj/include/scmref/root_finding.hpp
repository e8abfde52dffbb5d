#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "scmref/errors.hpp"

namespace scmref::numeric {

struct RootOptions {
  double abs_residual = 1e-13;
  double rel_width = 4.0 * std::numeric_limits<double>::epsilon();
  int max_iterations = 400;
};

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs.
///
/// Bisection keeps the bracket; each iteration first tries a secant
/// (false-position, Illinois-weighted) step and falls back to the midpoint
/// whenever the secant step fails to halve the bracket.
template <class Fn>
double find_root(Fn&& f, double lo, double hi, const RootOptions& opt = {}) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0) || !std::isfinite(flo) || !std::isfinite(fhi)) {
    throw SolverError("root not bracketed", lo, hi);
  }
  int side = 0;
  double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double fbest = std::min(std::abs(flo), std::abs(fhi));
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double width = hi - lo;
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
    }
    const double fx = f(x);
    if (!std::isfinite(fx)) {
      throw SolverError("non-finite residual during root search", lo, hi);
    }
    if (std::abs(fx) < fbest) {
      best = x;
      fbest = std::abs(fx);
    }
    if (fx == 0.0 || std::abs(fx) < opt.abs_residual) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo > 0.5 * width) {
      // Secant step stalled: force a bisection.
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (std::abs(fm) < fbest) {
        best = mid;
        fbest = std::abs(fm);
      }
      if (fm == 0.0 || std::abs(fm) < opt.abs_residual) return mid;
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
        fhi = fm;
      }
      side = 0;
    }
    if (hi - lo <= opt.rel_width * std::max(std::abs(lo), std::abs(hi))) {
      return best;
    }
  }
  throw SolverError("root search exceeded iteration cap", lo, hi);
}

/// Golden-section minimisation of a unimodal f on [lo, hi].
/// Returns (argmin, min).
template <class Fn>
std::pair<double, double> golden_section(Fn&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace scmref::numeric
