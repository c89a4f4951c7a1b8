#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lrdx/process.hpp"
#include "lrdx/stats.hpp"

using namespace lrdx;

namespace {

const TailModel& ln2() {
  static const TailModel m = TailModel::log_normal(2.0);
  return m;
}

const ProcessSetup& setup_at(std::int64_t n) {
  static const ProcessSetup s200(ln2(), MemoryParams(2, 0.6), 200);
  static const ProcessSetup s2000(ln2(), MemoryParams(2, 0.6), 2000);
  return n == 200 ? s200 : s2000;
}

}  // namespace

TEST(Process, ReconstructionIsExact) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const ProcessPath p = sample_process(setup_at(2000), rng);
    EXPECT_EQ(reconstruct_values(p), p.values);
  }
}

TEST(Process, AtomsOrderedAndTruncated) {
  const ProcessSetup& s = setup_at(2000);
  Rng rng(3);
  const ProcessPath p = sample_process(s, rng);
  const double cutoff = ln2().scale() * s.norm().w_n;
  for (std::size_t j = 0; j < p.atoms.size(); ++j) {
    EXPECT_LT(p.atoms[j].gamma, cutoff);
    EXPECT_GE(p.atoms[j].magnitude, 0.0);
    if (j > 0) {
      EXPECT_GT(p.atoms[j].gamma, p.atoms[j - 1].gamma);
      EXPECT_LE(p.atoms[j].magnitude, p.atoms[j - 1].magnitude);
    }
  }
}

TEST(Process, AtomCountIsPoisson) {
  const ProcessSetup& s = setup_at(200);
  const double mean = ln2().scale() * s.norm().w_n;
  const int reps = 2000;
  std::vector<double> counts(reps);
  for (int i = 0; i < reps; ++i) {
    Rng rng = replica_stream(99, static_cast<std::uint64_t>(i));
    counts[i] = static_cast<double>(sample_process(s, rng).atoms.size());
  }
  const Summary sum = summarize(counts);
  EXPECT_LE(std::abs(sum.mean - mean), 4 * std::sqrt(mean / reps));
  EXPECT_NEAR(sum.stdev * sum.stdev / mean, 1.0, 0.15);
}

TEST(Process, ThinnedMarginalMatchesFullSeries) {
  const ProcessSetup& s = setup_at(200);
  const int reps = 4000;
  std::vector<double> full(reps), thinned(reps);
  Rng rng(7);
  for (int i = 0; i < reps; ++i) full[i] = sample_process(s, rng).values[0];
  for (int i = 0; i < reps; ++i) thinned[i] = sample_marginal_x0(ln2(), rng);
  // Two-sample KS critical value at level 0.001 is about 1.95 sqrt(2/reps).
  EXPECT_LE(ks_two_sample(full, thinned), 1.95 * std::sqrt(2.0 / reps));
}

TEST(Process, ExtremalPathAndM) {
  Rng rng(5);
  const ProcessPath p = sample_process(setup_at(2000), rng);
  const std::vector<double> grid{0.1, 0.5, 1.0};
  const auto e = empirical_extremal(p, grid);
  EXPECT_LE(e[0], e[1]);
  EXPECT_LE(e[1], e[2]);
  EXPECT_EQ(e[2], *std::max_element(p.values.begin(), p.values.end()));
  EXPECT_EQ(empirical_M(p, Interval::closed(0.0, 1.0)), e[2]);
  EXPECT_THROW(empirical_M(p, Interval::open(0.5, 0.5004)), std::invalid_argument);
}

TEST(Process, EpochLawMustMatch) {
  Rng rng(1);
  EXPECT_THROW(sample_process(ln2(), MemoryParams(2, 0.6), EpochLaw(0.55), 100, rng), std::invalid_argument);
}

TEST(LowerBound, BoundedByEmpiricalMax) {
  const ProcessSetup& s = setup_at(2000);
  const Interval b = Interval::closed(0.2, 0.9);
  LowerBoundOptions opts;
  opts.index_cap = 32;
  int finite = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Rng rng(seed);
    const ProcessPath p = sample_process(s, rng);
    const LowerBoundReport r = lower_bound_stat(p, s, b, opts, rng);
    if (!r.finite) continue;
    ++finite;
    ASSERT_EQ(r.j_star.size(), 2u);
    EXPECT_LT(r.j_star[0], r.j_star[1]);
    EXPECT_LE(r.j_star[1], 32);
    ASSERT_TRUE(r.j_extra.has_value());
    EXPECT_GT(*r.j_extra, r.j_star[1]);
    EXPECT_LE(r.value, empirical_M(p, b) * (1 + 1e-12));
    const BigJumpSummary bj = big_jump_report(r, s);
    EXPECT_EQ(bj.top_over_vw.size(), 2u);
  }
  EXPECT_GT(finite, 20);
}

TEST(LowerBound, RejectsBadDelta) {
  const ProcessSetup& s = setup_at(200);
  Rng rng(1);
  const ProcessPath p = sample_process(s, rng);
  LowerBoundOptions opts;
  opts.delta0 = 0.5;
  EXPECT_THROW(lower_bound_stat(p, s, Interval::closed(0, 1), opts, rng), std::invalid_argument);
  EXPECT_GT(default_delta0(s.mem()), 0.0);
  LowerBoundReport empty;
  EXPECT_THROW(big_jump_report(empty, s), std::invalid_argument);
}

TEST(Remainder, MeanMatchesIntegral) {
  const double w = setup_at(2000).norm().w_n;
  for (std::int64_t first : {1, 5}) {
    const int reps = 40000;
    std::vector<double> x(reps);
    Rng rng(static_cast<std::uint64_t>(first) + 100);
    for (auto& v : x) v = sample_remainder_x0(ln2(), w, first, rng);
    const Summary s = summarize(x);
    EXPECT_LE(std::abs(s.mean - remainder_mean_integral(ln2(), w, first)), 4 * s.std_error) << first;
  }
  Rng rng(1);
  EXPECT_THROW(sample_remainder_x0(ln2(), w, 0, rng), std::invalid_argument);
}

TEST(Remainder, FirstIndexOneIsTheMarginal) {
  const double w = setup_at(200).norm().w_n;
  const int reps = 4000;
  std::vector<double> a(reps), b(reps);
  Rng rng(13);
  for (auto& v : a) v = sample_remainder_x0(ln2(), w, 1, rng);
  for (auto& v : b) v = sample_marginal_x0(ln2(), rng);
  EXPECT_LE(ks_two_sample(a, b), 1.95 * std::sqrt(2.0 / reps));
}

TEST(Remainder, CheckArguments) {
  const MemoryParams mem(2, 0.6);
  const EpochLaw law(0.6);
  EXPECT_THROW(remainder_tail_check(ln2(), mem, law, 1000, 0.0, 0.2, 10, 1), std::invalid_argument);
  EXPECT_THROW(remainder_tail_check(ln2(), mem, law, 1000, 0.5, 0.5, 10, 1), std::invalid_argument);
  const RemainderCheck c = remainder_tail_check(ln2(), mem, law, 1000, 0.5, 0.2, 500, 1);
  EXPECT_EQ(c.first_index, static_cast<std::int64_t>(std::ceil(std::pow(1000.0, 0.2))));
  EXPECT_GE(c.frequency, 0.0);
  EXPECT_LE(c.frequency, 1.0);
}
