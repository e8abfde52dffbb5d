#pragma once

// Monte Carlo propagation of a V_X offset spread to I_REF.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "scmref/acm.hpp"
#include "scmref/errors.hpp"
#include "scmref/metrics.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/tech.hpp"
#include "scmref/temperature.hpp"

namespace scmref {

struct McSample {
  std::size_t trial = 0;
  double delta_vt = 0.0;  // applied offset [V]
  double i_ref = 0.0;     // [A], NaN for failed trials
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size()); }
};

struct McResult {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) estimator
  double sigma_over_mu = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<McSample> samples;
  Histogram histogram;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram: need at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  const double w = h.hi - h.lo;
  for (double v : values) {
    std::size_t k = w > 0.0 ? static_cast<std::size_t>((v - h.lo) / w * static_cast<double>(bins)) : 0;
    h.counts[std::min(k, bins - 1)] += 1;
  }
  return h;
}

/// Each trial perturbs dV_T by N(0, sigma_vx) and re-solves the equilibrium.
/// Trial k draws from its own generator seeded with splitmix64(seed ^ k), so
/// results do not depend on evaluation order.
inline McResult monte_carlo_variability(const DesignPoint& design, const TechProfile& tech, Temperature t,
                                        double sigma_vx, std::size_t trials, std::uint64_t seed,
                                        double s2_over_n = 1.0, std::size_t histogram_bins = 20) {
  design.validate();
  if (trials < 100) throw DomainError("monte_carlo_variability: trials must be >= 100");
  if (!(sigma_vx >= 0.0)) throw DomainError("monte_carlo_variability: sigma_vx must be >= 0");
  const double u_t = acm::thermal_voltage(t);
  const double isq = acm::isq_at(tech, t);

  McResult res;
  res.trials = trials;
  res.samples.reserve(trials);
  std::vector<double> ok;
  ok.reserve(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    std::mt19937_64 gen(detail::splitmix64(seed ^ detail::splitmix64(k)));
    std::normal_distribution<double> dist(0.0, 1.0);
    const double dvt = design.delta_vt + sigma_vx * dist(gen);
    McSample s{k, dvt, std::numeric_limits<double>::quiet_NaN()};
    try {
      s.i_ref = isq * solve_if2_raw(design.alpha, design.k_ptat, dvt, tech.n, u_t) * s2_over_n;
      ok.push_back(s.i_ref);
    } catch (const std::runtime_error&) {
      ++res.failures;
    }
    res.samples.push_back(s);
  }
  if (static_cast<double>(res.failures) > 0.01 * static_cast<double>(trials)) {
    throw SolverError("monte_carlo_variability: " + std::to_string(res.failures) + " of " +
                          std::to_string(trials) + " trials failed (> 1%)",
                      0.0, 0.0);
  }
  // Moments about the first sample, so identical samples give exactly zero.
  const double n = static_cast<double>(ok.size());
  const double shift = ok.front();
  double sd = 0.0;
  double sd2 = 0.0;
  for (double v : ok) {
    sd += v - shift;
    sd2 += (v - shift) * (v - shift);
  }
  res.mean = shift + sd / n;
  res.stddev = ok.size() > 1 ? std::sqrt(std::max(0.0, (sd2 - sd * sd / n) / (n - 1.0))) : 0.0;
  res.sigma_over_mu = res.stddev / res.mean;
  res.histogram = make_histogram(ok, histogram_bins);
  return res;
}

}  // namespace scmref
