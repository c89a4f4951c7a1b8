#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrdx/interval.hpp"
#include "lrdx/memory.hpp"
#include "lrdx/renewal.hpp"
#include "lrdx/rng.hpp"
#include "lrdx/stable.hpp"

namespace lrdx {

struct SupMeasureOptions {
  int truncation = 64;
  std::int64_t resolution = 4096;
};

// Truncated sup-measure: weights U_j = -log Gamma_j on lattice regenerative
// sets R_1..R_k. A lattice point's value is the sum of the `order` largest
// weights among the sets covering it (-inf if fewer cover it); M(B) is the
// max over B. This is the best order-subset whose sets meet inside B.
class SupMeasureSample {
 public:
  static SupMeasureSample draw(const WindowSampler& window, int order, int truncation, Rng& rng);
  static SupMeasureSample draw(const MemoryParams& mem, const SupMeasureOptions& opts, Rng& rng);

  double beta() const { return beta_; }
  int order() const { return order_; }
  int truncation() const { return static_cast<int>(gammas_.size()); }
  std::int64_t resolution() const { return resolution_; }
  const std::vector<double>& gammas() const { return gammas_; }
  const std::vector<LatticeSet>& sets() const { return sets_; }

  double evaluate(const Interval& b) const;
  std::vector<double> extremal_path(std::span<const double> grid) const;
  // Lattice points covered by more than `order` sets.
  std::int64_t multiplicity_anomalies() const { return anomalies_; }
  // Whether the maximizing lattice value over b is attained by two different
  // subsets (exact tie).
  bool has_tie(const Interval& b) const;

 private:
  double beta_ = 0;
  int order_ = 0;
  std::int64_t resolution_ = 0;
  std::vector<double> gammas_;
  std::vector<LatticeSet> sets_;
  std::vector<double> eta_;
  std::vector<std::uint64_t> subset_key_;
  std::int64_t anomalies_ = 0;
};

double sample_limit_M(const SupMeasureSample& sample, const Interval& b);
std::vector<double> limit_extremal_path(const SupMeasureSample& sample, std::span<const double> grid);

// Poisson representation of the Gumbel extremal process: atoms (u, g) with
// intensity du e^{-g} dg restricted to g > level.
class GumbelExtremalSample {
 public:
  static GumbelExtremalSample draw(double level, Rng& rng);
  double at(double t) const;
  std::vector<double> path(std::span<const double> grid) const;
  std::size_t atoms() const { return u_.size(); }
  double level() const { return level_; }

 private:
  double level_ = 0;
  std::vector<double> u_;
  std::vector<double> g_;
};

// Exact fdd: independent block maxima log(dt) + Gumbel over grid increments.
std::vector<double> sample_gumbel_extremal(std::span<const double> grid, Rng& rng);
// P(E_0(t_i) <= x_i for all i).
double gumbel_joint_cdf(std::span<const double> grid, std::span<const double> levels);

struct DominanceResult {
  double lhs = 0;
  double lhs_se = 0;
  double rhs = 0;
  double margin = 0;  // (lhs - rhs) / lhs_se
  std::int64_t replicas = 0;
  std::int64_t anomalies = 0;
};

// lhs: MC P(E_beta(t_i) <= x_i), rhs: P(E_0(t_i^{1-beta}) <= x_i) in closed form.
DominanceResult dominance_check(double beta, int order, std::span<const double> times,
                                std::span<const double> levels, std::int64_t replicas,
                                const SupMeasureOptions& opts, std::uint64_t seed);
DominanceResult dominance_check(const MemoryParams& mem, std::span<const double> times,
                                std::span<const double> levels, std::int64_t replicas,
                                const SupMeasureOptions& opts, std::uint64_t seed);

struct FrechetFit {
  double sigma = 0;
  double ks = 0;
  double p_value = 1;
};

// 1-Frechet F(x) = exp(-sigma / x) fitted by maximum likelihood, then KS.
FrechetFit frechet_fit_ks(std::span<const double> positive_sample);

}  // namespace lrdx
