#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scmref/reference_model.hpp"

using namespace scmref;

namespace {

TechProfile generic_tech() {
  TechProfile t;
  t.n = 1.2;
  t.m = 1.25;
  return t;
}

}  // namespace

TEST(VxScm, Oracle) {
  EXPECT_NEAR(vx_scm(1.0, 5.0, 1.2, 0.02585), oracle::kVxScm_1_5, 1e-15);
  EXPECT_NEAR(vx_scm(1.0, 5.0, 1.2, 0.02585), 70.97e-3, 5e-6);
}

TEST(VxScm, AlphaNearOne) { EXPECT_NEAR(vx_scm(3.0, 1.0 + 1e-12, 1.2, 0.0257), 0.0, 1e-13); }

TEST(VxScm, LinearInN) {
  EXPECT_NEAR(vx_scm(2.0, 3.0, 2.4, 0.0257), 2.0 * vx_scm(2.0, 3.0, 1.2, 0.0257), 1e-16);
}

TEST(VxScm, DomainErrors) {
  EXPECT_THROW(vx_scm(0.0, 2.0, 1.2, 0.0257), DomainError);
  EXPECT_THROW(vx_scm(1.0, 1.0, 1.2, 0.0257), DomainError);
  EXPECT_THROW(vx_scm(1.0, 0.5, 1.2, 0.0257), DomainError);
}

TEST(VxScm, MonotoneInBothArguments) {
  for (double i = 0.01; i < 100.0; i *= 1.5) {
    EXPECT_LT(vx_scm(i, 3.0, 1.2, 0.0257), vx_scm(i * 1.5, 3.0, 1.2, 0.0257));
    EXPECT_LT(vx_scm(i, 3.0, 1.2, 0.0257), vx_scm(i, 3.3, 1.2, 0.0257));
  }
}

TEST(BetaFromVx, ZeroVxGivesOne) { EXPECT_EQ(beta_from_vx(0.0, 2.0, 1.2, 0.0257), 1.0); }

TEST(BetaFromVx, OracleAndResidual) {
  const double ut = oracle::kUt25;
  const double vx = vx_scm(6.8, 2.9, 1.2, ut);
  EXPECT_NEAR(vx, oracle::kVxScm_6p8_2p9, 1e-16);
  const double b = beta_from_vx(vx, 6.8, 1.2, ut);
  EXPECT_NEAR(b, oracle::kBeta_6p8, 1e-12);
  // Residual of the defining relation in U_T units.
  auto G = [](double i) { return std::sqrt(1.0 + i) + std::log(std::sqrt(1.0 + i) - 1.0); };
  EXPECT_NEAR(vx * 0.2 / (1.2 * ut) - (G(6.8) - G(b * 6.8)), 0.0, 1e-12);
}

TEST(BetaFromVx, DecreasesWithVx) {
  double prev = 1.0;
  for (double vx = 0.005; vx < 0.3; vx += 0.005) {
    const double b = beta_from_vx(vx, 3.0, 1.2, 0.0257);
    EXPECT_LT(b, prev);
    EXPECT_GT(b, 0.0);
    prev = b;
  }
}

TEST(BetaFromVx, SaturationSignalledDistinctly) {
  EXPECT_THROW(beta_from_vx(5.0, 1.0, 1.2, 0.0257), SaturatedDevice);
  EXPECT_THROW(beta_from_vx(-0.01, 1.0, 1.2, 0.0257), DomainError);
}

TEST(VxBetaMultiplier, Examples) {
  EXPECT_EQ(vx_beta_multiplier(1.0, 0.0, 1.2, 0.0257), 0.0);
  EXPECT_NEAR(vx_beta_multiplier(6.0, 0.02, 1.2, 0.025693), oracle::kVxBm_6_20m, 1e-16);
  EXPECT_NEAR(vx_beta_multiplier(6.0, 0.02, 1.2, 0.025693), 75.24e-3, 5e-6);
}

TEST(VxBetaMultiplier, PtatWithoutOffset) {
  const double a = vx_beta_multiplier(6.0, 0.0, 1.2, acm::thermal_voltage(Temperature::kelvin(250.0)));
  const double b = vx_beta_multiplier(6.0, 0.0, 1.2, acm::thermal_voltage(Temperature::kelvin(500.0)));
  EXPECT_NEAR(b / a, 2.0, 1e-15);
}

TEST(SolveIf2, GenericOracle) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const double i = solve_if2(d, generic_tech(), reference_temperature());
  EXPECT_NEAR(i, oracle::kIf2Generic25, 1e-11 * oracle::kIf2Generic25);
  EXPECT_NEAR(i, 6.8, 0.1);
}

TEST(SolveIf2, PtatCaseIsTemperatureIndependent) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.0);
  const auto tech = generic_tech();
  const double i25 = solve_if2(d, tech, Temperature::celsius(25.0));
  for (double c : {-40.0, 85.0}) {
    EXPECT_NEAR(solve_if2(d, tech, Temperature::celsius(c)), i25, 1e-9 * i25);
  }
}

TEST(SolveIf2, DecreasingInTemperatureWithOffset) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto tech = generic_tech();
  double prev = INFINITY;
  for (const auto& t : default_temperature_grid()) {
    const double i = solve_if2(d, tech, t);
    EXPECT_LT(i, prev);
    prev = i;
  }
}

TEST(SolveIf2, InfeasibleDesignDetected) {
  // ln K + dVT/(nU_T) <= ln alpha: no equilibrium.
  EXPECT_THROW(solve_if2_raw(8.0, 2.0, 0.0, 1.2, 0.0257), InfeasibleDesign);
  EXPECT_THROW(solve_if2_raw(3.0, 3.0, 0.0, 1.2, 0.0257), InfeasibleDesign);
  EXPECT_THROW(solve_if2_raw(2.0, 1.0, 0.0, 1.2, 0.0257), InfeasibleDesign);
}

TEST(SolveIf2, SingleSignChangeProperty) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ua(1.2, 10.0);
  std::uniform_real_distribution<double> uk(1.0, 50.0);
  std::uniform_real_distribution<double> ud(0.0, 0.04);
  for (int n = 0; n < 200; ++n) {
    const double a = ua(gen);
    const double k = uk(gen);
    const double dvt = ud(gen);
    const double rhs = std::log(k) + dvt / (1.2 * 0.0257);
    if (rhs <= std::log(a)) continue;
    int changes = 0;
    double prev = detail::scm_difference(1e-9, a) - rhs;
    for (double l = -9.0; l <= 5.0; l += 0.05) {
      const double cur = detail::scm_difference(std::pow(10.0, l), a) - rhs;
      if ((cur > 0.0) != (prev > 0.0)) ++changes;
      prev = cur;
    }
    EXPECT_EQ(changes, 1);
  }
}

TEST(ReferenceCurrent, PtatLaw) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.0);
  const auto tech = generic_tech();
  const double i0 = reference_current(d, tech, reference_temperature(), 1.0);
  for (const auto& t : default_temperature_grid()) {
    const double ratio = reference_current(d, tech, t, 1.0) / i0;
    EXPECT_NEAR(ratio, std::pow(t.kelvin() / 298.15, 0.75), 1e-6 * ratio);
  }
}

TEST(ReferenceCurrent, LinearInS2OverN) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto tech = generic_tech();
  const auto t = Temperature::celsius(60.0);
  EXPECT_DOUBLE_EQ(reference_current(d, tech, t, 2.0), 2.0 * reference_current(d, tech, t, 1.0));
}

TEST(ReferenceCurrent, GenericCaseIsNearlyFlat) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto tech = generic_tech();
  const double i0 = reference_current(d, tech, reference_temperature(), 1.0);
  for (const auto& t : default_temperature_grid()) {
    EXPECT_NEAR(reference_current(d, tech, t, 1.0) / i0, 1.0, 0.03);
  }
  const double s2n = oracle::kS2Generic;  // S_2 / N for 1.25 nA at 25 degC
  EXPECT_NEAR(reference_current(d, tech, Temperature::celsius(85.0), s2n), oracle::kIref85Generic,
              1e-10 * oracle::kIref85Generic);
}

TEST(OperatingPoint, VxConsistencyAndBetaRange) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto tech = generic_tech();
  for (const auto& t : default_temperature_grid()) {
    const auto op = operating_point(d, tech, t, 1.0);
    const double u = acm::thermal_voltage(t);
    EXPECT_NEAR(vx_scm(op.i_f2, d.alpha, tech.n, u), op.v_x, 1e-12);
    EXPECT_GE(op.beta, 0.0);
    EXPECT_LE(op.beta, 1.0);
    EXPECT_NEAR(op.i_f1 / op.i_f2, d.alpha, 4e-16 * d.alpha);
    EXPECT_GT(op.i_ref, 0.0);
  }
  const auto op25 = operating_point(d, tech, reference_temperature(), 1.0);
  EXPECT_NEAR(op25.v_x, oracle::kVxGeneric25, 1e-16);
  EXPECT_NEAR(op25.beta, oracle::kBetaGeneric25, 1e-11);
  EXPECT_NEAR(op25.s_iref, oracle::kSirefGeneric25, 1e-10 * oracle::kSirefGeneric25);
}

TEST(OperatingPoint, VxAffineInTemperatureWithOffsetIntercept) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto tech = generic_tech();
  // V_X(T) = c T + dVT exactly: extrapolating to 0 K returns the offset.
  const auto a = operating_point(d, tech, Temperature::kelvin(250.0), 1.0);
  const auto b = operating_point(d, tech, Temperature::kelvin(350.0), 1.0);
  const double slope = (b.v_x - a.v_x) / 100.0;
  EXPECT_NEAR(a.v_x - slope * 250.0, 0.02, 1e-14);
}

TEST(DesignPoint, Validation) {
  auto d = DesignPoint::make(2.9, 6.0, 0.02);
  EXPECT_NO_THROW(d.validate());
  d.alpha = 1.0;
  EXPECT_THROW(d.validate(), DomainError);
  d = DesignPoint::make(2.9, 6.0, 0.02);
  d.j_ratio = 2.0;
  EXPECT_THROW(d.validate(), DomainError);
  d.k_ratio = 3.0;
  EXPECT_NO_THROW(d.validate());
  d.delta_vt = -0.001;
  EXPECT_THROW(d.validate(), DomainError);
}

TEST(TemperatureSweep, NoLeakEqualsZeroLeak) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto tech = generic_tech();
  const auto grid = default_temperature_grid();
  const auto a = temperature_sweep(d, tech, grid, 1e-3);
  SweepOptions opt;
  opt.leak = LeakagePerturbation{LeakageProfile({200.0, 400.0}, {0.0, 0.0}), LeakageProfile({200.0, 400.0}, {0.0, 0.0})};
  const auto b = temperature_sweep(d, tech, grid, 1e-3, opt);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k].i_ref, b.points[k].i_ref);
  EXPECT_EQ(a.tc_ppm, b.tc_ppm);
  EXPECT_FALSE(a.ptat_mode);
}

TEST(TemperatureSweep, TcMatchesOracle) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const auto sweep = temperature_sweep(d, generic_tech(), default_temperature_grid(), 1.0);
  EXPECT_NEAR(sweep.tc_ppm, oracle::kTcGeneric, 1e-8 * oracle::kTcGeneric);
}

TEST(TemperatureSweep, PtatModeFlag) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.0);
  const auto sweep = temperature_sweep(d, generic_tech(), default_temperature_grid(), 1.0);
  EXPECT_TRUE(sweep.ptat_mode);
  EXPECT_NEAR(sweep.tc_ppm, oracle::kTcPtatLaw, 1e-6 * oracle::kTcPtatLaw);
}

namespace {

LeakageProfile exp_profile(double i25, double doubling_k) {
  std::vector<double> t;
  std::vector<double> i;
  for (double c = -40.0; c <= 85.0; c += 5.0) {
    t.push_back(c + 273.15);
    i.push_back(i25 * std::exp2((c - 25.0) / doubling_k));
  }
  return LeakageProfile(t, i);
}

}  // namespace

TEST(TemperatureSweep, LeakageDeviationAppearsAtHighTemperature) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  const double s2n = oracle::kS2Generic;
  SweepOptions opt;
  opt.leak = LeakagePerturbation{exp_profile(1e-13, 8.0), LeakageProfile()};
  const auto clean = temperature_sweep(d, generic_tech(), default_temperature_grid(), s2n);
  const auto leaky = temperature_sweep(d, generic_tech(), default_temperature_grid(), s2n, opt);
  double prev = 0.0;
  for (std::size_t k = 0; k < clean.points.size(); ++k) {
    const auto t = clean.points[k].temperature;
    const double rel = (clean.points[k].i_ref - leaky.points[k].i_ref) / clean.points[k].i_ref;
    EXPECT_NEAR(rel, opt.leak->vx.at(t) / clean.points[k].i_ref, 1e-12) << t.celsius();
    if (t.celsius() < 50.0) {
      EXPECT_LT(rel, 1e-3) << t.celsius();
    }
    EXPECT_GT(rel, prev);
    prev = rel;
  }
  EXPECT_GT(leaky.tc_ppm, clean.tc_ppm);
}

TEST(TemperatureSweep, DoublingLeakageNeverDecreasesTc) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> amp(-14.0, -11.5);
  std::uniform_real_distribution<double> dbl(6.0, 20.0);
  for (int k = 0; k < 20; ++k) {
    SweepOptions a;
    a.leak = LeakagePerturbation{exp_profile(std::pow(10.0, amp(gen)), dbl(gen)), LeakageProfile()};
    SweepOptions b;
    b.leak = a.leak->scaled(2.0);
    const auto ta = temperature_sweep(d, generic_tech(), default_temperature_grid(), oracle::kS2Generic, a);
    const auto tb = temperature_sweep(d, generic_tech(), default_temperature_grid(), oracle::kS2Generic, b);
    EXPECT_GE(tb.tc_ppm, ta.tc_ppm);
  }
}

TEST(TemperatureSweep, FailingPointNamesTemperature) {
  // Offset law that makes the design infeasible above 50 degC.
  const auto d = DesignPoint::make(6.5, 6.0, 0.02);
  SweepOptions opt;
  opt.delta_vt_law = [](Temperature t) { return t.celsius() > 50.0 ? 0.0 : 0.02; };
  try {
    temperature_sweep(d, generic_tech(), default_temperature_grid(), 1.0, opt);
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("55.0"), std::string::npos) << e.what();
  }
}

TEST(TemperatureSweep, RejectsBadGrid) {
  const auto d = DesignPoint::make(2.9, 6.0, 0.02);
  EXPECT_THROW(temperature_sweep(d, generic_tech(), {reference_temperature()}, 1.0), DomainError);
}

TEST(Leakage, LogLinearInterpolationAndClamp) {
  LeakageProfile p({300.0, 310.0}, {1e-12, 4e-12});
  EXPECT_NEAR(p.at(Temperature::kelvin(305.0)), 2e-12, 1e-24);
  EXPECT_EQ(p.at(Temperature::kelvin(250.0)), 1e-12);
  EXPECT_EQ(p.at(Temperature::kelvin(400.0)), 4e-12);
  EXPECT_THROW(LeakageProfile({300.0, 300.0}, {1.0, 1.0}), InputError);
  EXPECT_THROW(LeakageProfile({300.0, 310.0}, {-1.0, 1.0}), InputError);
}
