#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "lrdx/heavy_tails.hpp"

using namespace lrdx;

TEST(LogNormalTail, AuxiliaryFunctionClosedForm) {
  const TailModel m = TailModel::log_normal(2.0);
  EXPECT_NEAR(m.auxiliary_h(std::exp(2.0)), 1.8472640247326626, 1e-12);
  EXPECT_NEAR(m.auxiliary_h(std::exp(4.0)), 6.8247687541430300, 1e-12);
}

TEST(LogNormalTail, ClampsAtThreshold) {
  const TailModel m = TailModel::log_normal(2.0);
  EXPECT_EQ(m.tail(1.0), 1.0);
  EXPECT_EQ(m.tail(0.3), 1.0);
  EXPECT_LT(m.tail(1.0001), 1.0);
  EXPECT_THROW(m.log_tail(0.5), std::domain_error);
}

TEST(LogNormalTail, QuantileClosedForm) {
  const TailModel m = TailModel::log_normal(2.0);
  // Vsharp(z) = exp(sqrt(log z)).
  EXPECT_NEAR(m.quantile_sharp(std::exp(9.0)), std::exp(3.0), 1e-10);
  EXPECT_DOUBLE_EQ(m.alpha(), 0.5);
  EXPECT_NEAR(m.zeta(16.0), 0.5 * 4.0, 1e-14);
}

TEST(LogNormalTail, RejectsBadExponent) {
  EXPECT_THROW(TailModel::log_normal(1.0), std::invalid_argument);
  EXPECT_THROW(TailModel::log_normal(2.0, 0.0), std::invalid_argument);
}

TEST(SuperLogNormalTail, LogTailAtIteratedPoint) {
  const TailModel m = TailModel::super_log_normal(1, 0.5);
  // g(x) = exp((log x)^0.5); x = e^{e^4} gives exp(e^2).
  EXPECT_NEAR(m.log_tail(std::exp(std::exp(4.0))), 1618.1779919126535, 1e-8);
  EXPECT_DOUBLE_EQ(m.threshold(), 1.0);
  EXPECT_DOUBLE_EQ(m.alpha(), 0.0);
}

TEST(SuperLogNormalTail, RequiresGammaBelowOne) {
  EXPECT_THROW(TailModel::super_log_normal(1, 1.0), std::invalid_argument);
  EXPECT_THROW(TailModel::super_log_normal(0, 0.5), std::invalid_argument);
}

class InversePair : public ::testing::TestWithParam<TailModel> {};

TEST_P(InversePair, TwelveDecades) {
  const TailModel& m = GetParam();
  const double z_lo = 10.0 * std::max(m.z0(), m.quantile_threshold() / m.scale());
  for (int i = 0; i <= 120; ++i) {
    const double z = z_lo * std::pow(10.0, i / 10.0);
    EXPECT_NEAR(z * m.levy_tail(m.quantile_V(z)), 1.0, 1e-9) << "z=" << z;
  }
}

TEST_P(InversePair, ClosedFormMatchesBisection) {
  const TailModel& m = GetParam();
  for (double z : {1e2, 1e5, 1e9, 1e13}) {
    EXPECT_NEAR(m.quantile_sharp_numeric(z) / m.quantile_sharp(z), 1.0, 1e-10) << "z=" << z;
  }
}

TEST_P(InversePair, DerivativeMatchesFiniteDifference) {
  const TailModel& m = GetParam();
  for (double x : {30.0, 1e3, 1e6}) {
    const double h = x * 1e-6;
    const double fd = (m.log_tail(x + h) - m.log_tail(x - h)) / (2 * h);
    EXPECT_NEAR(m.log_tail_derivative(x) / fd, 1.0, 1e-6);
  }
}

TEST_P(InversePair, VanishesBelowLevel) {
  const TailModel& m = GetParam();
  EXPECT_EQ(m.quantile_V(m.z0()), 0.0);
  EXPECT_EQ(m.quantile_V(0.1 * m.z0()), 0.0);
  EXPECT_GE(m.quantile_V(1.5 * m.z0()), m.threshold());
}

INSTANTIATE_TEST_SUITE_P(Families, InversePair,
                         ::testing::Values(TailModel::log_normal(2.0), TailModel::log_normal(1.5, 3.0),
                                           TailModel::super_log_normal(1, 0.5), TailModel::super_log_normal(2, 0.7)));

TEST(TailProperties, RapidVariation) {
  for (const TailModel& m : {TailModel::log_normal(2.0), TailModel::super_log_normal(1, 0.5)}) {
    double prev = 1.0;
    for (double t : {1e2, 1e4, 1e8, 1e16}) {
      const double r = std::exp(m.log_tail(t) - m.log_tail(2.0 * t));
      EXPECT_LT(r, prev);
      prev = r;
    }
    EXPECT_LT(prev, 1e-10);
  }
}

// Gamma-variation converges only logarithmically: the error at t shrinks like
// x^2 / (4 log t) for gamma = 2, so the check is on the trend and the leading
// term rather than a fixed 1% band.
TEST(TailProperties, GammaVariationTrend) {
  const TailModel m = TailModel::log_normal(2.0);
  for (double x : {0.5, 1.0, 2.0}) {
    double prev = 1e9;
    for (double z : {1e6, 1e12, 1e24, 1e48}) {
      const double t = m.quantile_V(z);
      const double err = std::fabs(std::exp(m.log_tail(t + x * m.auxiliary_h(t)) - m.log_tail(t)) / std::exp(x) - 1.0);
      EXPECT_LT(err, prev);
      prev = err;
    }
    const double t = m.quantile_V(1e48);
    const double lead = x * x / (4.0 * std::log(t));
    const double err = std::exp(m.log_tail(t + x * m.auxiliary_h(t)) - m.log_tail(t)) / std::exp(x) - 1.0;
    EXPECT_NEAR(std::fabs(err) / lead, 1.0, 0.3);
  }
}

TEST(TailProperties, PiVariationTrend) {
  const TailModel m = TailModel::log_normal(2.0);
  for (double x : {2.0, std::exp(1.0)}) {
    double prev = 1e9;
    for (double t : {1e6, 1e12, 1e24, 1e48}) {
      const double v = m.quantile_V(t);
      const double err = std::fabs((m.quantile_V(t * x) - v) / m.auxiliary_h(v) / std::log(x) - 1.0);
      EXPECT_LT(err, prev);
      prev = err;
    }
  }
}

TEST(TailProperties, PerturbationByLogFactor) {
  const TailModel m = TailModel::log_normal(2.0);
  for (double x : {1e8, 1e16, 1e32}) {
    const double L = std::log(x);
    const double v = m.quantile_V(x);
    EXPECT_LT(m.quantile_V(x * L) / v, 3.0);
    const double r = (m.quantile_V(x * L) - v) / m.auxiliary_h(v) / std::log(L);
    EXPECT_GT(r, 0.5);
    EXPECT_LT(r, 2.0);
  }
}

TEST(TailProperties, GrowthDiagnosticDiverges) {
  for (const TailModel& m : {TailModel::log_normal(2.0), TailModel::super_log_normal(1, 0.5)}) {
    const double d = m.growth_delta();
    double prev = 0.0;
    for (double u : {1e3, 1e6, 1e12, 1e24}) {
      const double r = m.zeta(u) / std::pow(std::log(u), d);
      EXPECT_GT(r, prev);
      prev = r;
    }
  }
}

TEST(Norming, LrdClosedForm) {
  const TailModel m = TailModel::log_normal(2.0);
  // V(e^9) = e^3, V(e^4) = e^2.
  const NormSeq s = lrd_norming(m, MemoryParams(2, 0.6), std::exp(9.0), std::exp(4.0));
  EXPECT_NEAR(s.b_n, 47.56012994530599, 1e-9);
  EXPECT_NEAR(s.a_n, 3.3475894871979446, 1e-10);
}

TEST(Norming, IidUsesFullTail) {
  const TailModel m = TailModel::log_normal(2.0, 2.0);
  const GumbelNorming g = iid_gumbel_norming(m, 1e6);
  EXPECT_NEAR(g.b, m.quantile_sharp(2e6), 1e-9);
  EXPECT_NEAR(g.a, m.auxiliary_h(g.b), 1e-12);
  EXPECT_THROW(iid_gumbel_norming(m, 1.0), std::domain_error);
}

TEST(Diagnostics, AssertedRowsPass) {
  for (const TailModel& m : {TailModel::log_normal(2.0), TailModel::super_log_normal(1, 0.5)}) {
    for (const auto& c : tail_diagnostics(m)) {
      if (c.asserted) EXPECT_TRUE(c.passed) << c.name;
    }
  }
}

TEST(IteratedMaps, Inverse) {
  EXPECT_NEAR(iterated_log(3, iterated_exp(3, 0.7)), 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(iterated_exp(0, 2.5), 2.5);
}

TEST(LogNormalTail, LogTailValues) {
  const TailModel m = TailModel::log_normal(2.0);
  EXPECT_NEAR(m.log_tail(std::exp(2.0)), 4.0, 1e-13);
  EXPECT_NEAR(m.tail(std::exp(2.0)), 0.018315638888734179, 1e-15);
  EXPECT_EQ(m.log_tail(1.0), 0.0);
}

TEST(LogNormalTail, QuantileVValues) {
  const TailModel m = TailModel::log_normal(2.0);
  EXPECT_NEAR(m.quantile_V(std::exp(9.0)), 20.085536923187668, 1e-10);
  EXPECT_NEAR(m.quantile_V(std::exp(4.0)), 7.3890560989306504, 1e-11);
}

TEST(LogNormalTail, AuxiliaryIdentityAndSublinearity) {
  for (const TailModel& m : {TailModel::log_normal(2.0), TailModel::log_normal(3.0), TailModel::super_log_normal(1, 0.5)}) {
    double prev = 1.0;
    for (double u : {1e2, 1e4, 1e8, 1e16, 1e32}) {
      EXPECT_GT(m.auxiliary_h(u), 0.0);
      EXPECT_NEAR(m.auxiliary_h(u) * m.log_tail_derivative(u), 1.0, 1e-12);
      EXPECT_LT(m.auxiliary_h(u) / u, prev);
      prev = m.auxiliary_h(u) / u;
    }
  }
}

TEST(LogNormalTail, ZetaRegularVariation) {
  const TailModel m = TailModel::log_normal(2.0);
  EXPECT_NEAR(m.zeta(4.0), 1.0, 1e-15);
  EXPECT_NEAR(m.zeta(1e8) / m.zeta(5e7), std::sqrt(2.0), 1e-12);
  const TailModel s = TailModel::super_log_normal(1, 0.5);
  // Slowly varying: the ratio approaches 1.
  double prev = 10.0;
  for (double u : {1e2, 1e6, 1e12, 1e24}) {
    const double r = s.zeta(u) / s.zeta(u / 2.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_LT(prev, 1.05);
}

TEST(Pitman, ConvergentAndMonotone) {
  const TailModel m = TailModel::log_normal(2.0);
  EXPECT_EQ(pitman_integral(m, m.threshold()), 0.0);
  const double i2 = pitman_integral(m, 1e2);
  const double i3 = pitman_integral(m, 1e3);
  const double i4 = pitman_integral(m, 1e4);
  EXPECT_GT(i2, 0.0);
  EXPECT_LE(i2, i3);
  EXPECT_LE(i3, i4);
  EXPECT_LT(i4 - i3, 1e-3);
}

TEST(Pitman, IntegrandDecaysLikeInverseSquare) {
  const TailModel m = TailModel::log_normal(2.0);
  for (double x : {1e2, 1e3, 1e4, 1e6}) {
    const double g1 = m.log_tail_derivative(x);
    const double integrand = std::exp(x * g1 - m.log_tail(x)) * g1;
    EXPECT_LT(integrand * x * x, 1.0) << x;
  }
}

TEST(Norming, IidClosedForm) {
  const TailModel m = TailModel::log_normal(2.0);
  const GumbelNorming g = iid_gumbel_norming(m, std::exp(16.0));
  EXPECT_NEAR(g.b, std::exp(4.0), 1e-9);
  EXPECT_NEAR(g.a, std::exp(4.0) / 8.0, 1e-10);
  EXPECT_LE(iid_gumbel_norming(m, 1e3).b, iid_gumbel_norming(m, 1e4).b);
}

TEST(Norming, ExtraTermClampsBelowLevel) {
  const TailModel m = TailModel::log_normal(2.0);
  const NormSeq s = lrd_norming(m, MemoryParams(2, 0.6), std::exp(9.0), 0.5);
  EXPECT_NEAR(s.b_n, 2.0 * std::exp(3.0), 1e-10);
  EXPECT_THROW(lrd_norming(m, MemoryParams(2, 0.6), 0.5, 0.5), std::domain_error);
}

TEST(Norming, ScaleSeparation) {
  const TailModel m = TailModel::log_normal(2.0);
  double prev = 0.0;
  for (double n : {1e3, 1e6, 1e12, 1e24}) {
    const double w = std::pow(n, 0.4) / 0.4;
    const double theta = std::pow(n, 0.2);
    const double r = m.auxiliary_h(m.quantile_V(w)) / m.auxiliary_h(m.quantile_V(theta));
    EXPECT_GT(r, prev);
    prev = r;
  }
}
