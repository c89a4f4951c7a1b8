#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lrdx/stable.hpp"
#include "lrdx/stats.hpp"

using namespace lrdx;

namespace {

std::vector<double> draw_marginals(const StableParams& p, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& y : out) y = sample_stable_marginal(p, rng);
  return out;
}

}  // namespace

TEST(Stable, LaplaceClosedForm) {
  const StableParams p(0.5);
  EXPECT_NEAR(p.laplace(1.0), 0.24311673443421421, 1e-15);
  EXPECT_NEAR(p.laplace(1.0), std::exp(-std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(p.scale(), std::pow(1.0 / std::cos(std::numbers::pi / 4), 2.0), 1e-12);
}

TEST(Stable, MarginalPositive) {
  for (double beta : {0.2, 0.5, 0.8}) {
    for (double y : draw_marginals(StableParams(beta), 20000, 3)) ASSERT_GT(y, 0.0);
  }
}

class LaplaceGrid : public ::testing::TestWithParam<double> {};

TEST_P(LaplaceGrid, EmpiricalTransformWithin3Se) {
  const StableParams p(GetParam());
  const auto ys = draw_marginals(p, 100000, 17);
  for (double g : {0.5, 1.0, 2.0}) {
    std::vector<double> e(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) e[i] = std::exp(-g * ys[i]);
    const Summary s = summarize(e);
    EXPECT_LE(std::abs(s.mean - p.laplace(g)), 3 * s.std_error) << "gamma=" << g;
  }
}

INSTANTIATE_TEST_SUITE_P(Betas, LaplaceGrid, ::testing::Values(0.2, 0.5, 0.8));

TEST(Stable, SelfSimilarity) {
  // Y(t) as a sum of 10 independent increments of length t/10 vs t^{1/beta} Y(1).
  const double beta = 0.6, t = 2.0;
  const StableParams p(beta);
  Rng rng(5);
  const int n = 20000;
  std::vector<double> direct(n), summed(n);
  for (int i = 0; i < n; ++i) direct[i] = std::pow(t, 1 / beta) * sample_stable_marginal(p, rng);
  const double piece = std::pow(t / 10, 1 / beta);
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int k = 0; k < 10; ++k) s += piece * sample_stable_marginal(p, rng);
    summed[i] = s;
  }
  EXPECT_LE(ks_two_sample(direct, summed), 0.02);
}

TEST(MittagLeffler, ZeroAndMean) {
  const StableParams p(0.5);
  Rng rng(1);
  EXPECT_EQ(sample_mittag_leffler(p, 0.0, rng), 0.0);
  EXPECT_NEAR(mittag_leffler_mean(p), 0.7978845608028654, 1e-13);
  std::vector<double> z(100000);
  for (auto& v : z) v = sample_mittag_leffler(p, 1.0, rng);
  const Summary s = summarize(z);
  EXPECT_LE(std::abs(s.mean - 0.7978845608028654), 3 * s.std_error);
}

TEST(MittagLeffler, SelfSimilarIndexBeta) {
  const double beta = 0.5, b = 0.3;
  const StableParams p(beta);
  Rng rng(9);
  const int n = 100000;
  std::vector<double> zb(n), z1(n);
  for (auto& v : zb) v = sample_mittag_leffler(p, b, rng);
  for (auto& v : z1) v = std::pow(b, beta) * sample_mittag_leffler(p, 1.0, rng);
  EXPECT_LE(ks_two_sample(zb, z1), 0.02);
}

TEST(MittagLeffler, FirstPassageOracle) {
  const double beta = 0.7;
  const StableParams p(beta);
  Rng rng(21);
  const int n = 3000;
  std::vector<double> direct(n), passage(n);
  for (auto& v : direct) v = sample_mittag_leffler(p, 1.0, rng);
  for (auto& v : passage) v = sample_first_passage(p, 1.0, 10.0, 4000, rng);
  // Grid cap and discretization bias are well below the KS noise at this size.
  EXPECT_LE(ks_two_sample(direct, passage), 0.05);
}

TEST(QLaw, MedianSupportAndCdf) {
  EXPECT_NEAR(std::pow(0.5, 1.25), 0.42044820762685727, 1e-15);
  Rng rng(2);
  std::vector<double> q(100000);
  for (auto& v : q) {
    v = sample_Q(0.2, rng);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
  EXPECT_NEAR(median(q), 0.42044820762685727, 0.01);
  EXPECT_LE(ks_statistic(q, [](double x) { return std::pow(std::clamp(x, 0.0, 1.0), 0.8); }), 0.01);
}

TEST(Lattice, PureRangeContainsOrigin) {
  const StableParams p(0.6);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const LatticeSet s = sample_regenerative_lattice(p, 1000, rng, false);
    ASSERT_FALSE(s.empty());
    EXPECT_EQ(s.points.front(), 0);
    EXPECT_NO_THROW(s.validate());
  }
}

TEST(Lattice, ShiftedMinimumFollowsQLaw) {
  const double beta = 0.6;
  const StableParams p(beta);
  Rng rng(8);
  std::vector<double> mins;
  for (int i = 0; i < 5000; ++i) {
    const LatticeSet s = sample_regenerative_lattice(p, 5000, rng, true);
    s.validate();
    mins.push_back(s.empty() ? 1.0 : s.at(0));
  }
  EXPECT_LE(ks_statistic(mins, [&](double x) { return std::pow(std::clamp(x, 0.0, 1.0), 1 - beta); }), 0.03);
}

TEST(Lattice, ValidateRejectsBadSets) {
  LatticeSet s;
  s.resolution = 10;
  s.points = {3, 2};
  EXPECT_THROW(s.validate(), std::logic_error);
  s.points = {2, 11};
  EXPECT_THROW(s.validate(), std::logic_error);
  s.points = {2, 5};
  s.shift = 0.9;
  EXPECT_THROW(s.validate(), std::logic_error);
  s.shift = 0.2;
  EXPECT_NO_THROW(s.validate());
}

TEST(IntersectionProb, KnownValues) {
  for (double beta : {0.1, 0.5, 0.9}) EXPECT_NEAR(intersection_prob(1, beta), 1.0, 1e-14);
  EXPECT_NEAR(intersection_prob(2, 0.75), std::numbers::pi / 4, 1e-14);
  EXPECT_NEAR(intersection_prob(2, 0.75), 0.7853981633974483, 1e-14);
  EXPECT_NEAR(intersection_prob(3, 0.75), 0.4112335167120566, 1e-13);
  EXPECT_NEAR(intersection_prob(2, 0.6), 0.4083061322767703, 1e-13);
  EXPECT_EQ(intersection_prob(4, 0.75), 0.0);
  EXPECT_EQ(intersection_prob(3, 0.6), 0.0);
  EXPECT_THROW(intersection_prob(0, 0.6), std::invalid_argument);
}

TEST(IntersectionProb, UnitIntervalOnGrid) {
  for (int s = 1; s <= 8; ++s) {
    for (int i = 1; i <= 99; ++i) {
      const double v = intersection_prob(s, i / 100.0);
      ASSERT_GE(v, 0.0) << s << " " << i;
      ASSERT_LE(v, 1.0) << s << " " << i;
    }
  }
}
