#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrdx/interval.hpp"
#include "lrdx/memory.hpp"
#include "lrdx/rng.hpp"

namespace lrdx {

// Return epochs phi >= 1 with P(phi > k) = (1+k)^(-beta).
class EpochLaw {
 public:
  explicit EpochLaw(double beta);

  double beta() const { return beta_; }
  double tail(std::int64_t k) const;  // P(phi > k)
  double pmf(std::int64_t k) const;   // P(phi = k)
  std::int64_t sample(Rng& rng) const;
  // Doney ratio k P(phi = k) / P(phi > k).
  double doney_ratio(std::int64_t k) const;

 private:
  static constexpr int kTable = 64;
  double beta_;
  double inv_beta_;
  // thresholds_[k] = (1+k)^(-beta): phi = min{k : thresholds_[k] < U}.
  std::array<double, kTable + 1> thresholds_{};
};

std::int64_t sample_epoch(const EpochLaw& law, Rng& rng);

// w_n = sum_{k=0}^{n} P(phi > k), exact partial sum.
double wandering_rate(const EpochLaw& law, std::int64_t n);

enum class SetOrigin { MuN, Pure, Derived };

struct ReturnSet {
  std::int64_t horizon = 0;
  std::vector<std::int64_t> points;
  SetOrigin origin = SetOrigin::Derived;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  bool contains(std::int64_t t) const;
  // Points t with t/horizon inside b.
  ReturnSet restricted(const Interval& b) const;
  void validate() const;

  static ReturnSet full(std::int64_t n);
};

// Sampler of mu_n return sets on {0..n}; keeps the first-zero table so
// repeated draws are cheap.
class WindowSampler {
 public:
  WindowSampler(const EpochLaw& law, std::int64_t n);

  const EpochLaw& law() const { return law_; }
  std::int64_t horizon() const { return n_; }
  double wandering_rate() const { return w_n_; }

  std::int64_t sample_first_zero(Rng& rng) const;
  ReturnSet sample(Rng& rng) const;
  void sample_into(Rng& rng, std::vector<std::int64_t>& out) const;
  // Draws a fresh set and reports whether it meets the sorted target; stops
  // early on the first hit.
  bool sample_hits(Rng& rng, std::span<const std::int64_t> target) const;

 private:
  EpochLaw law_;
  std::int64_t n_;
  double w_n_;
  std::vector<double> cumulative_;
};

ReturnSet sample_return_set(const EpochLaw& law, std::int64_t n, Rng& rng);
// Renewal range started at 0, truncated to {0..n}.
ReturnSet sample_pure_range(const EpochLaw& law, std::int64_t n, Rng& rng);

// L_* = [G(beta)G(1-beta)]^m / (G(beta*)G(1-beta*)).
double simultaneous_renewal_constant(const MemoryParams& mem);
// C_b = (1-b) / (G(2-b) cos(pi b / 2)).
double theta_constant(double beta_star);
double theta_n(const MemoryParams& mem, const EpochLaw& law, std::int64_t n);

ReturnSet intersect(std::span<const ReturnSet> sets);

struct Estimate {
  double estimate = 0;
  double std_error = 0;
  std::int64_t replicas = 0;
};

// Distance to the next common renewal of `walks` independent renewal walks
// started together; horizon + 1 when there is none within horizon.
std::int64_t next_meeting(const EpochLaw& law, int walks, std::int64_t horizon, Rng& rng);

Estimate escape_probability_mc(const MemoryParams& mem, const EpochLaw& law, std::int64_t horizon,
                               std::int64_t reps, Rng& rng);
// Same replicas evaluated at several horizons (pathwise nested).
std::vector<Estimate> escape_probability_curve(const MemoryParams& mem, const EpochLaw& law,
                                               std::span<const std::int64_t> horizons, std::int64_t reps,
                                               Rng& rng);

double capacity_mc(const ReturnSet& target, const EpochLaw& law, int reps_per_point, Rng& rng);

// Renewal mass u(d) = P(d in range), tabulated up to a bound (quadratic cost).
class RenewalMass {
 public:
  RenewalMass(const EpochLaw& law, std::int64_t max_distance);
  double operator()(std::int64_t d) const { return u_.at(static_cast<std::size_t>(d)); }
  std::int64_t max_distance() const { return static_cast<std::int64_t>(u_.size()) - 1; }

 private:
  std::vector<double> u_;
};

// Capacity by first-passage decomposition of the renewal mass (exact up to
// rounding); span of the target must not exceed the table.
double capacity_exact(const ReturnSet& target, const RenewalMass& u);

// Exact P(intersection of `sets` independent mu_n return sets is nonempty) at
// horizon n, from the renewal equation for the first common point. O(n^2).
double intersection_prob_finite(const EpochLaw& law, int sets, std::int64_t n);

// Exact E[|K ∩ nB| | K ∩ nB nonempty] for K the intersection of `sets`
// independent mu_n return sets (same renewal equation restricted to nB).
double conditional_count_finite(const EpochLaw& law, int sets, std::int64_t n, const Interval& b);

struct CapacityLlnRecord {
  std::int64_t n = 0;
  double mean = 0;
  double stdev = 0;
  double std_error = 0;
  double min = 0;
  double max = 0;
  std::int64_t replicas = 0;
};

// CR_{0,n}/n for the first n simultaneous-renewal points, escape judged within
// `horizon` (gaps beyond the horizon restart the range, see README).
double capacity_ratio_sample(const MemoryParams& mem, const EpochLaw& law, std::int64_t n, std::int64_t horizon,
                             Rng& rng);

std::vector<CapacityLlnRecord> capacity_lln_experiment(const MemoryParams& mem, const EpochLaw& law,
                                                       std::span<const std::int64_t> n_grid, std::int64_t reps,
                                                       std::int64_t horizon, std::uint64_t seed);

struct PnEll {
  double p_n = 0;
  std::int64_t ell_n = 0;
  std::size_t intersection_size = 0;
};

struct PnEllOptions {
  int capacity_reps_per_point = 200;
  // Cap on fresh sets drawn while searching for ell_n.
  std::int64_t max_search = 100000000;
};

// Rejection (nB misses the m-fold intersection) gives std::nullopt.
std::optional<PnEll> conditional_pn_and_elln(const MemoryParams& mem, const WindowSampler& window,
                                             const Interval& b, Rng& rng, const PnEllOptions& opts = {});

}  // namespace lrdx
