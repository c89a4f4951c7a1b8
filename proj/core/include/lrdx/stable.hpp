#pragma once

#include <cstdint>
#include <vector>

#include "lrdx/memory.hpp"
#include "lrdx/renewal.hpp"
#include "lrdx/rng.hpp"

namespace lrdx {

// Positive beta-stable law normalized so that E exp(-g Y) = exp(-g^beta / cos(pi beta / 2)).
class StableParams {
 public:
  explicit StableParams(double beta);
  double beta() const { return beta_; }
  double laplace_exponent(double g) const;
  double laplace(double g) const;
  // Rescaling from the exp(-g^beta) normalization.
  double scale() const { return scale_; }

 private:
  double beta_;
  double scale_;
};

double sample_stable_marginal(const StableParams& p, Rng& rng);

// Inverse subordinator at t: Z(t) = (t / Y(1))^beta in law.
double sample_mittag_leffler(const StableParams& p, double t, Rng& rng);
double mittag_leffler_mean(const StableParams& p);

// First grid time x at which a discretized subordinator path exceeds t.
double sample_first_passage(const StableParams& p, double t, double x_max, int steps, Rng& rng);

// P(Q <= q) = q^(1 - beta_eff).
double sample_Q(double beta_eff, Rng& rng);

// Points {t / resolution} of a lattice approximation of a regenerative set.
struct LatticeSet {
  std::int64_t resolution = 1;
  std::vector<std::int64_t> points;
  double shift = 0;

  double at(std::size_t i) const { return static_cast<double>(points[i]) / static_cast<double>(resolution); }
  bool empty() const { return points.empty(); }
  void validate() const;
};

// shifted: a mu_n return set (delayed start plays the role of Q); otherwise a
// pure range from 0.
LatticeSet sample_regenerative_lattice(const StableParams& p, std::int64_t n, Rng& rng, bool shifted);
LatticeSet sample_regenerative_lattice(const WindowSampler& window, Rng& rng);

// [G(b)G(2-b)]^s / (G(b_s)G(2-b_s)) with b_s = s b - s + 1, and 0 for s > ell_beta.
double intersection_prob(int s, double beta);

}  // namespace lrdx
