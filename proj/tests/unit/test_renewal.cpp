#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lrdx/renewal.hpp"
#include "lrdx/stats.hpp"

using namespace lrdx;

TEST(Memory, EllBetaStrict) {
  EXPECT_EQ(ell_beta(0.6), 2);
  EXPECT_EQ(ell_beta(0.75), 3);  // 1/(1-0.75) = 4 exactly, strict inequality
  EXPECT_EQ(ell_beta(0.5), 1);
  EXPECT_EQ(ell_beta(0.3), 1);
  EXPECT_EQ(ell_beta(0.8), 4);
}

TEST(Memory, AdmissibleRange) {
  EXPECT_TRUE(MemoryParams::admissible(2, 0.6));
  EXPECT_FALSE(MemoryParams::admissible(2, 0.5));
  EXPECT_FALSE(MemoryParams::admissible(2, 0.7));
  EXPECT_THROW(MemoryParams(2, 0.7), std::invalid_argument);
  EXPECT_THROW(MemoryParams(1, 0.3), std::invalid_argument);
  const MemoryParams p(3, 0.7);
  EXPECT_NEAR(p.beta_star(), 0.1, 1e-15);
  EXPECT_EQ(p.ell(), 3);
}

TEST(Memory, BetaStarBounds) {
  for (int m = 2; m <= 5; ++m) {
    for (int i = 1; i < 20; ++i) {
      const double lo = (m - 1.0) / m;
      const double hi = m / (m + 1.0);
      const double beta = lo + (hi - lo) * i / 20.0;
      const MemoryParams p(m, beta);
      EXPECT_GT(p.beta_star(), 0.0);
      EXPECT_LT(p.beta_star(), 1.0 - beta);
      EXPECT_LT(1.0 - beta, 0.5 + 1e-12);
      EXPECT_EQ(p.ell(), m);
    }
  }
}

TEST(EpochLaw, TailAndPmf) {
  const EpochLaw law(0.6);
  EXPECT_EQ(law.tail(0), 1.0);
  EXPECT_NEAR(law.tail(9), std::pow(10.0, -0.6), 1e-15);
  EXPECT_NEAR(law.pmf(1), 1.0 - std::pow(2.0, -0.6), 1e-15);
  EXPECT_EQ(law.pmf(0), 0.0);
  double s = 0.0;
  for (int k = 1; k <= 1000; ++k) s += law.pmf(k);
  EXPECT_NEAR(s, 1.0 - law.tail(1000), 1e-12);
}

TEST(EpochLaw, SampleTailFrequency) {
  const EpochLaw law(0.6);
  Rng rng(42);
  const int n = 100000;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    const auto e = law.sample(rng);
    ASSERT_GE(e, 1);
    above += e > 9 ? 1 : 0;
  }
  const double p = 0.25118864315095796;
  EXPECT_LE(std::fabs(above / double(n) - p), 3.0 * binomial_se(p, n));
}

TEST(EpochLaw, SlowPathAgreesWithTail) {
  // Large epochs go through the closed-form inverse; check P(phi > 1000).
  const EpochLaw law(0.3);
  Rng rng(3);
  const int n = 200000;
  int above = 0;
  for (int i = 0; i < n; ++i) above += sample_epoch(law, rng) > 1000 ? 1 : 0;
  const double p = law.tail(1000);
  EXPECT_LE(std::fabs(above / double(n) - p), 3.0 * binomial_se(p, n));
}

TEST(EpochLaw, DoneyRatioBounded) {
  const EpochLaw law(0.6);
  double sup = 0.0;
  for (std::int64_t k = 1; k <= 1000000; k += (k < 1000 ? 1 : k / 100)) sup = std::max(sup, law.doney_ratio(k));
  EXPECT_LE(sup, 1.1);
  EXPECT_NEAR(law.doney_ratio(1000000), 0.6, 1e-4);
}

TEST(WanderingRate, Values) {
  const EpochLaw law(0.6);
  EXPECT_EQ(wandering_rate(law, 0), 1.0);
  EXPECT_NEAR(wandering_rate(law, 100), 13.915508645979176, 1e-10);
  EXPECT_NEAR(wandering_rate(law, 1000000), 626.0193232119725, 1e-6);
  const double ratio = wandering_rate(law, 1000000) / (std::pow(1e6, 0.4) / 0.4);
  EXPECT_NEAR(ratio, 1.0, 0.02);
}

TEST(ReturnSet, ZeroHorizon) {
  const EpochLaw law(0.6);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const ReturnSet s = sample_return_set(law, 0, rng);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_EQ(s.points[0], 0);
  }
}

TEST(ReturnSet, InvariantsHold) {
  const EpochLaw law(0.6);
  const WindowSampler w(law, 5000);
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const ReturnSet s = w.sample(rng);
    EXPECT_NO_THROW(s.validate());
    EXPECT_FALSE(s.empty());
    EXPECT_EQ(s.origin, SetOrigin::MuN);
    EXPECT_TRUE(std::is_sorted(s.points.begin(), s.points.end()));
    EXPECT_LE(s.points.back(), 5000);
  }
}

TEST(ReturnSet, FirstZeroHistogram) {
  const EpochLaw law(0.6);
  const std::int64_t n = 2000;
  const WindowSampler w(law, n);
  Rng rng(77);
  const int reps = 100000;
  std::vector<int> hist(51, 0);
  for (int i = 0; i < reps; ++i) {
    const auto t = w.sample_first_zero(rng);
    if (t <= 50) ++hist[static_cast<std::size_t>(t)];
  }
  const double wn = wandering_rate(law, n);
  for (int k = 0; k <= 50; ++k) {
    const double p = law.tail(k) / wn;
    EXPECT_LE(std::fabs(hist[k] / double(reps) - p), 4.0 * binomial_se(p, reps)) << "k=" << k;
  }
}

TEST(ReturnSet, QLawSingleSet) {
  const EpochLaw law(0.6);
  const WindowSampler w(law, 5000);
  Rng rng(123);
  std::vector<double> q;
  for (int i = 0; i < 5000; ++i) q.push_back(static_cast<double>(w.sample_first_zero(rng)) / 5000.0);
  EXPECT_LE(ks_statistic(q, [](double x) { return x <= 0 ? 0.0 : std::pow(std::min(x, 1.0), 0.4); }), 0.03);
}

TEST(ReturnSet, RestrictedAndContains) {
  ReturnSet s{10, {0, 2, 5, 9, 10}, SetOrigin::Pure};
  EXPECT_TRUE(s.contains(5));
  EXPECT_FALSE(s.contains(4));
  const ReturnSet r = s.restricted(Interval::open(0.0, 1.0));
  EXPECT_EQ(r.points, (std::vector<std::int64_t>{2, 5, 9}));
  const ReturnSet c = s.restricted(Interval::closed(0.0, 1.0));
  EXPECT_EQ(c.points, s.points);
}

TEST(ReturnSet, ValidateRejectsBadSets) {
  EXPECT_THROW((ReturnSet{10, {3, 2}, SetOrigin::Derived}).validate(), std::logic_error);
  EXPECT_THROW((ReturnSet{10, {3, 11}, SetOrigin::Derived}).validate(), std::logic_error);
  EXPECT_THROW((ReturnSet{10, {}, SetOrigin::MuN}).validate(), std::logic_error);
}

TEST(Intersect, IdentityAndIdempotence) {
  const EpochLaw law(0.6);
  Rng rng(5);
  const ReturnSet s = sample_return_set(law, 1000, rng);
  const ReturnSet same[] = {s, s};
  EXPECT_EQ(intersect(same).points, s.points);
  const ReturnSet with_full[] = {s, ReturnSet::full(1000)};
  EXPECT_EQ(intersect(with_full).points, s.points);
  const ReturnSet bad[] = {s, ReturnSet::full(999)};
  EXPECT_THROW(intersect(bad), std::invalid_argument);
}

TEST(Intersect, ExactFiniteProbabilityMatchesMonteCarlo) {
  const EpochLaw law(0.75);
  const std::int64_t n = 300;
  const double exact = intersection_prob_finite(law, 2, n);
  const WindowSampler w(law, n);
  Rng rng(9);
  const int reps = 40000;
  int hits = 0;
  for (int i = 0; i < reps; ++i) {
    const ReturnSet s[] = {w.sample(rng), w.sample(rng)};
    hits += intersect(s).empty() ? 0 : 1;
  }
  EXPECT_LE(std::fabs(hits / double(reps) - exact), 3.5 * binomial_se(exact, reps));
  EXPECT_NEAR(intersection_prob_finite(law, 1, n), 1.0, 1e-10);
}

TEST(Intersect, ExactFiniteProbabilityIncreasesTowardLimit) {
  const EpochLaw law(0.75);
  const double p2 = intersection_prob_finite(law, 2, 100);
  const double p3 = intersection_prob_finite(law, 2, 1000);
  EXPECT_NEAR(p2, 0.49692, 5e-5);
  EXPECT_NEAR(p3, 0.58637, 5e-5);
  EXPECT_LT(p3, 0.7853981633974483);
}

TEST(Theta, Constants) {
  EXPECT_NEAR(theta_constant(0.5), 0.7978845608028654, 1e-13);
  EXPECT_NEAR(theta_constant(0.2), 0.9031398287145561, 1e-13);
  const MemoryParams p(2, 0.6);
  EXPECT_NEAR(simultaneous_renewal_constant(p), 2.0415306613838515, 1e-12);
  const EpochLaw law(0.6);
  EXPECT_NEAR(theta_n(p, law, 100000), 4.423836711334832, 1e-11);
  EXPECT_NEAR(theta_n(p, law, 10000), 2.791252263797817, 1e-11);
  EXPECT_LE(theta_n(p, law, 10), theta_n(p, law, 11));
  EXPECT_THROW(theta_n(p, EpochLaw(0.65), 100), std::invalid_argument);
}

TEST(Escape, HorizonOneExact) {
  const MemoryParams p(2, 0.6);
  const EpochLaw law(0.6);
  Rng rng(11);
  const Estimate e = escape_probability_mc(p, law, 1, 200000, rng);
  const double exact = 0.9606106099644139;
  EXPECT_LE(std::fabs(e.estimate - exact), 3.0 * e.std_error + 1e-12);
}

TEST(Escape, NestedAcrossHorizons) {
  const MemoryParams p(2, 0.6);
  const EpochLaw law(0.6);
  Rng rng(12);
  const std::int64_t horizons[] = {1000, 10000, 100000};
  const auto est = escape_probability_curve(p, law, horizons, 5000, rng);
  ASSERT_EQ(est.size(), 3u);
  EXPECT_GE(est[0].estimate, est[1].estimate);
  EXPECT_GE(est[1].estimate, est[2].estimate);
  EXPECT_GT(est[2].estimate, 0.0);
  EXPECT_LT(est[2].estimate, 1.0);
}

TEST(Escape, NextMeetingOfOneWalkIsItsEpoch) {
  const EpochLaw law(0.6);
  Rng a(21);
  Rng b(21);
  for (int i = 0; i < 100; ++i) {
    const auto e = law.sample(b);
    EXPECT_EQ(next_meeting(law, 1, 1000000, a), std::min<std::int64_t>(e, 1000001));
  }
}

TEST(Capacity, SingletonAndBounds) {
  const EpochLaw law(0.6);
  Rng rng(31);
  EXPECT_EQ(capacity_mc(ReturnSet{100, {40}, SetOrigin::Derived}, law, 50, rng), 1.0);
  const ReturnSet a{100, {0, 1, 3, 7, 20, 50}, SetOrigin::Derived};
  const double c = capacity_mc(a, law, 2000, rng);
  EXPECT_LE(c, static_cast<double>(a.size()));
  EXPECT_GE(c, 1.0);
}

TEST(Capacity, ExactMatchesMonteCarlo) {
  const EpochLaw law(0.6);
  const RenewalMass u(law, 200);
  const ReturnSet a{200, {0, 1, 2, 5, 11, 30, 31, 90, 200}, SetOrigin::Derived};
  Rng rng(32);
  const int reps = 20000;
  const double mc = capacity_mc(a, law, reps, rng);
  const double ex = capacity_exact(a, u);
  // Per-point estimates are independent binomials.
  EXPECT_NEAR(mc, ex, 3.0 * std::sqrt(a.size() * 0.25 / reps));
}

TEST(Capacity, SubadditiveWithinError) {
  const EpochLaw law(0.6);
  const RenewalMass u(law, 400);
  Rng rng(33);
  for (int r = 0; r < 20; ++r) {
    const ReturnSet x = sample_pure_range(law, 400, rng);
    ReturnSet y = sample_pure_range(law, 400, rng);
    ReturnSet both{400, {}, SetOrigin::Derived};
    std::set_union(x.points.begin(), x.points.end(), y.points.begin(), y.points.end(), std::back_inserter(both.points));
    EXPECT_LE(capacity_exact(both, u), capacity_exact(x, u) + capacity_exact(y, u) + 1e-9);
  }
}

TEST(Capacity, RenewalMassRecursion) {
  const EpochLaw law(0.6);
  const RenewalMass u(law, 50);
  EXPECT_EQ(u(0), 1.0);
  EXPECT_NEAR(u(1), law.pmf(1), 1e-15);
  EXPECT_NEAR(u(2), law.pmf(2) + law.pmf(1) * law.pmf(1), 1e-15);
}

TEST(CapacityLln, RatiosInUnitIntervalAndReproducible) {
  const MemoryParams p(2, 0.6);
  const EpochLaw law(0.6);
  const std::int64_t grid[] = {50, 200};
  const auto a = capacity_lln_experiment(p, law, grid, 60, 20000, 5);
  const auto b = capacity_lln_experiment(p, law, grid, 60, 20000, 5);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_GE(a[i].min, 0.0);
    EXPECT_LE(a[i].max, 1.0);
  }
}

TEST(Conditional, EllAtLeastMPlusOne) {
  const MemoryParams p(2, 0.6);
  const WindowSampler w(EpochLaw(0.6), 2000);
  Rng rng(41);
  int accepted = 0;
  for (int i = 0; i < 200 && accepted < 20; ++i) {
    PnEllOptions opts;
    opts.capacity_reps_per_point = 50;
    const auto r = conditional_pn_and_elln(p, w, Interval::open(0.0, 1.0), rng, opts);
    if (!r) continue;
    ++accepted;
    EXPECT_GE(r->ell_n, 3);
    EXPECT_GT(r->p_n, 0.0);
    EXPECT_LE(r->p_n, r->intersection_size / w.wandering_rate() + 1e-12);
  }
  EXPECT_GT(accepted, 0);
}

// Given p_n, ell_n - m is geometric on {1,2,...}. Uses a fixed intersection
// and the exact hit probability of a fresh set.
TEST(Conditional, GeometricSearchChiSquare) {
  const EpochLaw law(0.6);
  const std::int64_t n = 400;
  const WindowSampler w(law, n);
  Rng rng(43);
  const ReturnSet target{n, {100, 101, 150, 300}, SetOrigin::Derived};
  // Hit probability estimated on an independent stream first.
  int hits = 0;
  const int pilot = 200000;
  for (int i = 0; i < pilot; ++i) hits += w.sample_hits(rng, target.points) ? 1 : 0;
  const double p = hits / double(pilot);
  std::vector<double> observed(40, 0.0);
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    int k = 1;
    while (!w.sample_hits(rng, target.points)) ++k;
    observed[static_cast<std::size_t>(std::min(k, 40) - 1)] += 1.0;
  }
  std::vector<double> expected(40, 0.0);
  for (int k = 1; k < 40; ++k) expected[k - 1] = reps * p * std::pow(1 - p, k - 1);
  expected[39] = reps * std::pow(1 - p, 39);
  const ChiSquare c = chi_square_gof(observed, expected, 5.0, 1);
  EXPECT_GT(c.p_value, 0.001);
}
