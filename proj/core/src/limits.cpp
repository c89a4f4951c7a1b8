#include "lrdx/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrdx/stats.hpp"

namespace lrdx {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SupMeasureSample SupMeasureSample::draw(const WindowSampler& window, int order, int truncation, Rng& rng) {
  if (order < 1) throw std::invalid_argument("sup-measure order must be >= 1");
  if (truncation < order) throw std::invalid_argument("sup-measure truncation must be >= order");
  SupMeasureSample s;
  s.beta_ = window.law().beta();
  s.order_ = order;
  s.resolution_ = window.horizon();
  s.gammas_.resize(static_cast<std::size_t>(truncation));
  s.sets_.resize(static_cast<std::size_t>(truncation));
  double g = 0.0;
  for (int j = 0; j < truncation; ++j) {
    g += rng.exponential();
    s.gammas_[static_cast<std::size_t>(j)] = g;
    s.sets_[static_cast<std::size_t>(j)] = sample_regenerative_lattice(window, rng);
  }
  const auto size = static_cast<std::size_t>(s.resolution_ + 1);
  std::vector<int> count(size, 0);
  std::vector<double> acc(size, 0.0);
  s.subset_key_.assign(size, 0);
  // Sets arrive in decreasing weight order, so the first `order` hits at a
  // point are its best subset.
  for (int j = 0; j < truncation; ++j) {
    const double u = -std::log(s.gammas_[static_cast<std::size_t>(j)]);
    for (std::int64_t t : s.sets_[static_cast<std::size_t>(j)].points) {
      const auto i = static_cast<std::size_t>(t);
      if (++count[i] <= order) {
        acc[i] += u;
        s.subset_key_[i] = s.subset_key_[i] * 131 + static_cast<std::uint64_t>(j + 1);
      }
    }
  }
  s.eta_.assign(size, kNegInf);
  for (std::size_t i = 0; i < size; ++i) {
    if (count[i] >= order) s.eta_[i] = acc[i];
    if (count[i] > order) ++s.anomalies_;
  }
  return s;
}

SupMeasureSample SupMeasureSample::draw(const MemoryParams& mem, const SupMeasureOptions& opts, Rng& rng) {
  return draw(WindowSampler(EpochLaw(mem.beta()), opts.resolution), mem.ell(), opts.truncation, rng);
}

double SupMeasureSample::evaluate(const Interval& b) const {
  const LatticeWindow w = b.lattice(resolution_);
  double best = kNegInf;
  for (std::int64_t t = w.first; t <= w.last; ++t) best = std::max(best, eta_[static_cast<std::size_t>(t)]);
  return best;
}

bool SupMeasureSample::has_tie(const Interval& b) const {
  const LatticeWindow w = b.lattice(resolution_);
  double best = kNegInf;
  std::uint64_t key = 0;
  bool tie = false;
  for (std::int64_t t = w.first; t <= w.last; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (eta_[i] == kNegInf) continue;
    if (eta_[i] > best) {
      best = eta_[i];
      key = subset_key_[i];
      tie = false;
    } else if (eta_[i] == best && subset_key_[i] != key) {
      tie = true;
    }
  }
  return tie;
}

std::vector<double> SupMeasureSample::extremal_path(std::span<const double> grid) const {
  if (grid.empty()) throw std::invalid_argument("extremal path needs a nonempty grid");
  std::vector<double> out;
  out.reserve(grid.size());
  double running = kNegInf;
  std::int64_t next = 0;
  double prev = 0.0;
  for (double t : grid) {
    if (!(t > 0.0 && t <= 1.0) || t < prev) throw std::invalid_argument("extremal grid must increase within (0,1]");
    prev = t;
    const LatticeWindow w = Interval::closed(0.0, t).lattice(resolution_);
    for (; next <= w.last; ++next) running = std::max(running, eta_[static_cast<std::size_t>(next)]);
    out.push_back(running);
  }
  return out;
}

double sample_limit_M(const SupMeasureSample& sample, const Interval& b) { return sample.evaluate(b); }

std::vector<double> limit_extremal_path(const SupMeasureSample& sample, std::span<const double> grid) {
  return sample.extremal_path(grid);
}

GumbelExtremalSample GumbelExtremalSample::draw(double level, Rng& rng) {
  GumbelExtremalSample s;
  s.level_ = level;
  // Marks above `level` arrive as -log of unit Poisson arrivals in e^{-level} scale.
  const double mass = std::exp(-level);
  double gamma = rng.exponential();
  while (gamma < mass) {
    s.u_.push_back(rng.uniform());
    s.g_.push_back(-std::log(gamma));
    gamma += rng.exponential();
  }
  return s;
}

double GumbelExtremalSample::at(double t) const {
  double best = level_;
  for (std::size_t i = 0; i < u_.size(); ++i)
    if (u_[i] <= t) best = std::max(best, g_[i]);
  return best;
}

std::vector<double> GumbelExtremalSample::path(std::span<const double> grid) const {
  std::vector<double> out;
  for (double t : grid) out.push_back(at(t));
  return out;
}

std::vector<double> sample_gumbel_extremal(std::span<const double> grid, Rng& rng) {
  std::vector<double> out;
  out.reserve(grid.size());
  double prev = 0.0;
  double running = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    if (!(t > prev) || t > 1.0) throw std::invalid_argument("gumbel grid must increase within (0,1]");
    running = std::max(running, std::log(t - prev) + rng.gumbel());
    out.push_back(running);
    prev = t;
  }
  return out;
}

double gumbel_joint_cdf(std::span<const double> grid, std::span<const double> levels) {
  if (grid.size() != levels.size() || grid.empty()) throw std::invalid_argument("gumbel_joint_cdf: size mismatch");
  double exponent = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = levels[i];
    for (std::size_t k = i + 1; k < levels.size(); ++k) x = std::min(x, levels[k]);
    exponent += (grid[i] - prev) * std::exp(-x);
    prev = grid[i];
  }
  return std::exp(-exponent);
}

DominanceResult dominance_check(double beta, int order, std::span<const double> times,
                                std::span<const double> levels, std::int64_t replicas,
                                const SupMeasureOptions& opts, std::uint64_t seed) {
  if (times.size() != levels.size() || times.empty()) throw std::invalid_argument("dominance_check: size mismatch");
  if (replicas < 1) throw std::invalid_argument("dominance_check: replicas must be >= 1");
  const WindowSampler window(EpochLaw(beta), opts.resolution);
  DominanceResult r;
  r.replicas = replicas;
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < replicas; ++i) {
    Rng rng = replica_stream(seed, static_cast<std::uint64_t>(i));
    const SupMeasureSample s = SupMeasureSample::draw(window, order, opts.truncation, rng);
    const std::vector<double> path = s.extremal_path(times);
    bool below = true;
    for (std::size_t k = 0; k < path.size(); ++k) below = below && path[k] <= levels[k];
    hits += below ? 1 : 0;
    r.anomalies += s.multiplicity_anomalies() > 0 ? 1 : 0;
  }
  r.lhs = static_cast<double>(hits) / static_cast<double>(replicas);
  r.lhs_se = binomial_se(r.lhs, replicas);
  std::vector<double> changed(times.begin(), times.end());
  for (double& t : changed) t = std::pow(t, 1.0 - beta);
  r.rhs = gumbel_joint_cdf(changed, levels);
  r.margin = r.lhs_se > 0.0 ? (r.lhs - r.rhs) / r.lhs_se : 0.0;
  return r;
}

DominanceResult dominance_check(const MemoryParams& mem, std::span<const double> times,
                                std::span<const double> levels, std::int64_t replicas,
                                const SupMeasureOptions& opts, std::uint64_t seed) {
  return dominance_check(mem.beta(), mem.ell(), times, levels, replicas, opts, seed);
}

FrechetFit frechet_fit_ks(std::span<const double> sample) {
  double inv_sum = 0.0;
  std::size_t positive = 0;
  for (double x : sample) {
    if (x > 0.0 && std::isfinite(x)) {
      inv_sum += 1.0 / x;
      ++positive;
    }
  }
  if (positive == 0) throw std::invalid_argument("frechet_fit_ks: no positive observations");
  FrechetFit f;
  f.sigma = static_cast<double>(positive) / inv_sum;
  const double sigma = f.sigma;
  f.ks = ks_statistic({sample.begin(), sample.end()}, [sigma](double x) { return x > 0.0 ? std::exp(-sigma / x) : 0.0; });
  f.p_value = ks_pvalue(f.ks, sample.size());
  return f;
}

}  // namespace lrdx
