#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scmref/metrics.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/variability.hpp"

using namespace scmref;

namespace {

BoxSeries linear_series(double lo, double hi, double x0, double x1, int n) {
  BoxSeries s;
  for (int k = 0; k < n; ++k) {
    const double w = static_cast<double>(k) / (n - 1);
    s.axis.push_back(x0 + w * (x1 - x0));
    s.values.push_back(lo + w * (hi - lo));
  }
  return s;
}

/// (1/I) dI/dV_X by central differences of +-h on the offset.
double s_iref_fd(double i_f2, double alpha, double n, double u_t, double h = 1e-6) {
  const double k = std::exp(detail::scm_difference(i_f2, alpha));  // dV_T = 0 reproduces i_f2
  const double up = solve_if2_raw(alpha, k, h, n, u_t);
  const double dn = solve_if2_raw(alpha, k, -h, n, u_t);
  return (std::log(up) - std::log(dn)) / (2.0 * h);
}

TechProfile generic_tech() {
  TechProfile t;
  t.n = 1.2;
  t.m = 1.25;
  return t;
}

}  // namespace

TEST(BoxTc, ConstantIsZero) {
  EXPECT_EQ(box_tc(linear_series(1e-9, 1e-9, -40.0, 85.0, 26)), 0.0);
}

TEST(BoxTc, LinearArithmetic) {
  const double tc = box_tc(linear_series(1.0e-9, 1.1e-9, -40.0, 85.0, 26));
  EXPECT_NEAR(tc, oracle::kBoxTcLinear, 1e-9 * oracle::kBoxTcLinear);
}

TEST(BoxTc, ScaleInvariance) {
  auto s = linear_series(1.0e-9, 1.3e-9, -40.0, 85.0, 26);
  s.values[7] = 0.7e-9;
  const double a = box_tc(s);
  // Binary scale factors are exact in floating point.
  for (auto& v : s.values) v *= 1024.0;
  EXPECT_EQ(box_tc(s), a);
  for (auto& v : s.values) v *= 10.0;
  EXPECT_NEAR(box_tc(s), a, 1e-13 * a);
}

TEST(BoxTc, Errors) {
  BoxSeries s{{1.0}, {1.0}};
  EXPECT_THROW(box_tc(s), DomainError);
  BoxSeries t{{1.0, 1.0}, {1.0, 2.0}};
  EXPECT_THROW(box_tc(t), DomainError);
  BoxSeries u{{1.0, 2.0}, {1.0}};
  EXPECT_THROW(box_tc(u), DomainError);
}

TEST(BoxLs, Examples) {
  EXPECT_EQ(box_ls(linear_series(1e-9, 1e-9, 0.9, 1.8, 10)), 0.0);
  const double ls = box_ls(linear_series(1.00e-9, 1.01e-9, 0.9, 1.8, 2));
  EXPECT_NEAR(ls, oracle::kBoxLsExample, 1e-9 * oracle::kBoxLsExample);
  auto s = linear_series(1.00e-9, 1.01e-9, 0.9, 1.8, 2);
  for (auto& v : s.values) v *= 4.0;
  EXPECT_EQ(box_ls(s), ls);
}

TEST(SIref, PositiveAndOracle) {
  const double s = s_iref_closed_form(oracle::kIf2Generic25, 2.9, 1.2, oracle::kUt25);
  EXPECT_NEAR(s, oracle::kSirefGeneric25, 1e-12 * s);
  EXPECT_THROW(s_iref_closed_form(0.0, 2.0, 1.2, 0.0257), DomainError);
  EXPECT_THROW(s_iref_closed_form(1.0, 1.0, 1.2, 0.0257), DomainError);
}

TEST(SIref, FiniteDifferenceGrid) {
  const double ut = oracle::kUt25;
  for (double alpha : {1.5, 3.0, 5.0, 8.0}) {
    for (double l = std::log10(0.05); l <= 2.0 + 1e-9; l += 0.1) {
      const double i = std::pow(10.0, l);
      const double s = s_iref_closed_form(i, alpha, 1.2, ut);
      EXPECT_LT(std::abs(s - s_iref_fd(i, alpha, 1.2, ut)) / s, 1e-4) << "i=" << i << " alpha=" << alpha;
    }
  }
}

TEST(SIref, DecreasesWithInversionLevel) {
  for (double alpha : {1.5, 3.0, 5.0, 8.0}) {
    double prev = INFINITY;
    for (double i = 0.01; i < 200.0; i *= 1.2) {
      const double s = s_iref_closed_form(i, alpha, 1.2, 0.0257);
      EXPECT_LT(s, prev);
      prev = s;
    }
  }
}

TEST(SIref, UnitConversion) {
  EXPECT_DOUBLE_EQ(per_volt_to_pct_per_mv(50.0), 5.0);
  EXPECT_DOUBLE_EQ(pct_per_mv_to_per_volt(2.73), 27.3);
}

TEST(FirstOrderVariability, Examples) {
  const auto e = first_order_variability(1.37e-3, pct_per_mv_to_per_volt(2.73));
  EXPECT_NEAR(e.sigma_over_mu * 100.0, 3.74, 0.005);
  EXPECT_EQ(first_order_variability(0.0, 30.0).sigma_over_mu, 0.0);
  EXPECT_DOUBLE_EQ(first_order_variability(2e-3, 30.0).sigma_over_mu,
                   2.0 * first_order_variability(1e-3, 30.0).sigma_over_mu);
  EXPECT_THROW(first_order_variability(-1e-3, 30.0), DomainError);
}

TEST(MonteCarlo, ZeroSigmaGivesZeroSpread) {
  const auto r = monte_carlo_variability(DesignPoint::make(2.9, 6.0, 0.02), generic_tech(), reference_temperature(),
                                         0.0, 200, 1);
  EXPECT_EQ(r.sigma_over_mu, 0.0);
  EXPECT_EQ(r.failures, 0u);
}

TEST(MonteCarlo, SmallSigmaMatchesFirstOrder) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto t = reference_temperature();
  const auto r = monte_carlo_variability(d, generic_tech(), t, 0.1e-3, 20000, 12345);
  const auto op = operating_point(d, generic_tech(), t, 1.0);
  const double fo = first_order_variability(0.1e-3, op.s_iref).sigma_over_mu;
  EXPECT_LT(std::abs(r.sigma_over_mu - fo) / fo, 0.05);
}

TEST(MonteCarlo, SeedReproducibility) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto a = monte_carlo_variability(d, generic_tech(), reference_temperature(), 1e-3, 500, 99);
  const auto b = monte_carlo_variability(d, generic_tech(), reference_temperature(), 1e-3, 500, 99);
  const auto c = monte_carlo_variability(d, generic_tech(), reference_temperature(), 1e-3, 500, 100);
  EXPECT_EQ(a.sigma_over_mu, b.sigma_over_mu);
  EXPECT_EQ(a.histogram.counts, b.histogram.counts);
  EXPECT_NE(a.sigma_over_mu, c.sigma_over_mu);
  std::size_t total = 0;
  for (auto n : a.histogram.counts) total += n;
  EXPECT_EQ(total, 500u);
  EXPECT_EQ(a.histogram.counts.size(), 20u);
}

TEST(MonteCarlo, LargeSigmaMatchesQuadrature) {
  // Outside the linear regime the reference is sigma/mu of I_REF(dV_T + sigma z)
  // integrated against the normal density; the sign of its departure from
  // first order is recorded, not asserted.
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto t = reference_temperature();
  const double sigma = 5e-3;
  const double ut = acm::thermal_voltage(t);
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int k = -4000; k <= 4000; ++k) {
    const double z = k * 2e-3;
    const double w = std::exp(-0.5 * z * z);
    const double i = solve_if2_raw(d.alpha, d.k_ptat, d.delta_vt + sigma * z, 1.2, ut);
    m0 += w;
    m1 += w * i;
    m2 += w * i * i;
  }
  const double mean = m1 / m0;
  const double exact = std::sqrt(m2 / m0 - mean * mean) / mean;
  const std::size_t n = 20000;
  const auto r = monte_carlo_variability(d, generic_tech(), t, sigma, n, 5);
  // Four standard errors of a sample standard deviation.
  EXPECT_LT(std::abs(r.sigma_over_mu - exact) / exact, 4.0 / std::sqrt(2.0 * (n - 1)));
  const double fo = first_order_variability(sigma, operating_point(d, generic_tech(), t, 1.0).s_iref).sigma_over_mu;
  RecordProperty("nonlinear_minus_first_order_sign", exact > fo ? "+" : "-");
}

TEST(MonteCarlo, Preconditions) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  EXPECT_THROW(monte_carlo_variability(d, generic_tech(), reference_temperature(), 1e-3, 99, 1), DomainError);
  EXPECT_THROW(monte_carlo_variability(d, generic_tech(), reference_temperature(), -1e-3, 100, 1), DomainError);
}

TEST(MonteCarlo, ExcessFailuresAbort) {
  // Design right at the feasibility edge: about half the trials fail.
  auto d = DesignPoint::make(2.9, 2.9, 0.0);
  d.delta_vt = 1e-6;
  EXPECT_THROW(monte_carlo_variability(d, generic_tech(), reference_temperature(), 1e-3, 200, 1), SolverError);
}
