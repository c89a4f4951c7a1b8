#include "lrdx/stable.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lrdx {

StableParams::StableParams(double beta) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("stable law needs beta in (0,1)");
  scale_ = std::pow(1.0 / std::cos(std::numbers::pi * beta / 2.0), 1.0 / beta);
}

double StableParams::laplace_exponent(double g) const {
  return std::pow(g, beta_) / std::cos(std::numbers::pi * beta_ / 2.0);
}

double StableParams::laplace(double g) const { return std::exp(-laplace_exponent(g)); }

double sample_stable_marginal(const StableParams& p, Rng& rng) {
  // Kanter's representation of the exp(-g^beta) law.
  const double b = p.beta();
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double a = std::sin(b * u) / std::pow(std::sin(u), 1.0 / b);
  const double c = std::pow(std::sin((1.0 - b) * u) / e, (1.0 - b) / b);
  return p.scale() * a * c;
}

double sample_mittag_leffler(const StableParams& p, double t, Rng& rng) {
  if (t < 0.0) throw std::invalid_argument("sample_mittag_leffler: t must be >= 0");
  if (t == 0.0) return 0.0;
  return std::pow(t / sample_stable_marginal(p, rng), p.beta());
}

double mittag_leffler_mean(const StableParams& p) {
  return std::cos(std::numbers::pi * p.beta() / 2.0) / boost::math::tgamma(1.0 + p.beta());
}

double sample_first_passage(const StableParams& p, double t, double x_max, int steps, Rng& rng) {
  if (steps < 1 || !(x_max > 0.0)) throw std::invalid_argument("sample_first_passage: bad grid");
  const double dx = x_max / steps;
  const double inc_scale = std::pow(dx, 1.0 / p.beta());
  double y = 0.0;
  for (int k = 1; k <= steps; ++k) {
    y += inc_scale * sample_stable_marginal(p, rng);
    if (y > t) return k * dx;
  }
  return x_max;
}

double sample_Q(double beta_eff, Rng& rng) {
  if (!(beta_eff > 0.0 && beta_eff < 1.0)) throw std::invalid_argument("sample_Q: beta must lie in (0,1)");
  return std::pow(rng.uniform(), 1.0 / (1.0 - beta_eff));
}

void LatticeSet::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < 0 || points[i] > resolution) throw std::logic_error("lattice point outside [0,1]");
    if (i > 0 && points[i] <= points[i - 1]) throw std::logic_error("lattice points not increasing");
  }
  if (!points.empty() && at(0) < shift - 1.0 / resolution) throw std::logic_error("lattice set starts before its shift");
}

LatticeSet sample_regenerative_lattice(const WindowSampler& window, Rng& rng) {
  LatticeSet s;
  s.resolution = window.horizon();
  window.sample_into(rng, s.points);
  s.shift = s.at(0);
  return s;
}

LatticeSet sample_regenerative_lattice(const StableParams& p, std::int64_t n, Rng& rng, bool shifted) {
  if (n < 1) throw std::invalid_argument("sample_regenerative_lattice: n must be >= 1");
  const EpochLaw law(p.beta());
  if (shifted) return sample_regenerative_lattice(WindowSampler(law, n), rng);
  LatticeSet s;
  s.resolution = n;
  s.points = sample_pure_range(law, n, rng).points;
  s.shift = 0.0;
  return s;
}

double intersection_prob(int s, double beta) {
  if (s < 1) throw std::invalid_argument("intersection_prob: s must be >= 1");
  if (s > ell_beta(beta)) return 0.0;
  if (s == 1) return 1.0;  // numerator and denominator agree; avoid a 1 + ulp result
  using boost::math::tgamma;
  const double bs = s * beta - s + 1.0;
  return std::min(1.0, std::pow(tgamma(beta) * tgamma(2.0 - beta), s) / (tgamma(bs) * tgamma(2.0 - bs)));
}

}  // namespace lrdx
