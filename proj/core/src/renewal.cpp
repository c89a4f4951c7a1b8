#include "lrdx/renewal.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <numbers>
#include <stdexcept>

#include "lrdx/stats.hpp"

namespace lrdx {

EpochLaw::EpochLaw(double beta) : beta_(beta), inv_beta_(1.0 / beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("epoch law needs beta in (0,1)");
  for (int k = 0; k <= kTable; ++k) thresholds_[k] = std::pow(1.0 + k, -beta_);
}

double EpochLaw::tail(std::int64_t k) const {
  if (k < 0) return 1.0;
  return std::pow(1.0 + static_cast<double>(k), -beta_);
}

double EpochLaw::pmf(std::int64_t k) const {
  if (k < 1) return 0.0;
  return tail(k - 1) - tail(k);
}

double EpochLaw::doney_ratio(std::int64_t k) const { return static_cast<double>(k) * pmf(k) / tail(k); }

std::int64_t EpochLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  // phi > k  <=>  U <= (1+k)^(-beta)
  if (u > thresholds_[kTable]) {
    const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), u, std::greater<double>());
    return static_cast<std::int64_t>(it - thresholds_.begin());
  }
  const double x = std::floor(std::pow(u, -inv_beta_));
  if (!(x < 4.0e18)) return static_cast<std::int64_t>(4.0e18);
  return std::max<std::int64_t>(static_cast<std::int64_t>(x), kTable + 1);
}

std::int64_t sample_epoch(const EpochLaw& law, Rng& rng) { return law.sample(rng); }

double wandering_rate(const EpochLaw& law, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("wandering_rate: n must be >= 0");
  // Summed from the small terms up to limit rounding.
  double s = 0.0;
  for (std::int64_t k = n; k >= 0; --k) s += law.tail(k);
  return s;
}

bool ReturnSet::contains(std::int64_t t) const { return std::binary_search(points.begin(), points.end(), t); }

ReturnSet ReturnSet::restricted(const Interval& b) const {
  const LatticeWindow w = b.lattice(horizon);
  ReturnSet out{horizon, {}, SetOrigin::Derived};
  auto lo = std::lower_bound(points.begin(), points.end(), w.first);
  auto hi = std::upper_bound(points.begin(), points.end(), w.last);
  if (lo < hi) out.points.assign(lo, hi);
  return out;
}

void ReturnSet::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < 0 || points[i] > horizon) throw std::logic_error("return set point out of window");
    if (i > 0 && points[i] <= points[i - 1]) throw std::logic_error("return set not strictly increasing");
  }
  if (origin == SetOrigin::MuN && points.empty()) throw std::logic_error("mu_n return set is empty");
  if (origin == SetOrigin::Pure && (points.empty() || points.front() != 0)) {
    throw std::logic_error("pure range must contain 0");
  }
}

ReturnSet ReturnSet::full(std::int64_t n) {
  ReturnSet s{n, {}, SetOrigin::Derived};
  s.points.resize(static_cast<std::size_t>(n + 1));
  for (std::int64_t i = 0; i <= n; ++i) s.points[static_cast<std::size_t>(i)] = i;
  return s;
}

WindowSampler::WindowSampler(const EpochLaw& law, std::int64_t n) : law_(law), n_(n) {
  if (n < 0) throw std::invalid_argument("window horizon must be >= 0");
  cumulative_.resize(static_cast<std::size_t>(n + 1));
  double s = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    s += law.tail(k);
    cumulative_[static_cast<std::size_t>(k)] = s;
  }
  w_n_ = lrdx::wandering_rate(law, n);
}

std::int64_t WindowSampler::sample_first_zero(Rng& rng) const {
  const double target = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  return static_cast<std::int64_t>(it - cumulative_.begin());
}

void WindowSampler::sample_into(Rng& rng, std::vector<std::int64_t>& out) const {
  out.clear();
  std::int64_t t = sample_first_zero(rng);
  while (t <= n_) {
    out.push_back(t);
    t += law_.sample(rng);
  }
}

ReturnSet WindowSampler::sample(Rng& rng) const {
  ReturnSet s{n_, {}, SetOrigin::MuN};
  sample_into(rng, s.points);
  return s;
}

bool WindowSampler::sample_hits(Rng& rng, std::span<const std::int64_t> target) const {
  if (target.empty()) return false;
  const std::int64_t last = std::min(target.back(), n_);
  std::size_t idx = 0;
  std::int64_t t = sample_first_zero(rng);
  while (t <= last) {
    while (target[idx] < t) ++idx;
    if (target[idx] == t) return true;
    t += law_.sample(rng);
  }
  return false;
}

ReturnSet sample_return_set(const EpochLaw& law, std::int64_t n, Rng& rng) {
  return WindowSampler(law, n).sample(rng);
}

ReturnSet sample_pure_range(const EpochLaw& law, std::int64_t n, Rng& rng) {
  if (n < 0) throw std::invalid_argument("pure range horizon must be >= 0");
  ReturnSet s{n, {}, SetOrigin::Pure};
  std::int64_t t = 0;
  while (t <= n) {
    s.points.push_back(t);
    t += law.sample(rng);
  }
  return s;
}

double simultaneous_renewal_constant(const MemoryParams& mem) {
  using boost::math::tgamma;
  const double b = mem.beta();
  const double bs = mem.beta_star();
  return std::pow(tgamma(b) * tgamma(1.0 - b), mem.m()) / (tgamma(bs) * tgamma(1.0 - bs));
}

double theta_constant(double beta_star) {
  return (1.0 - beta_star) / (boost::math::tgamma(2.0 - beta_star) * std::cos(std::numbers::pi * beta_star / 2.0));
}

double theta_n(const MemoryParams& mem, const EpochLaw& law, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("theta_n: n must be >= 1");
  if (std::fabs(law.beta() - mem.beta()) > 1e-12) throw std::invalid_argument("theta_n: epoch law beta mismatch");
  const double bs = mem.beta_star();
  return theta_constant(bs) * std::pow(static_cast<double>(n), bs) / simultaneous_renewal_constant(mem);
}

ReturnSet intersect(std::span<const ReturnSet> sets) {
  if (sets.empty()) throw std::invalid_argument("intersect: no sets");
  ReturnSet out{sets[0].horizon, sets[0].points, SetOrigin::Derived};
  std::vector<std::int64_t> tmp;
  for (std::size_t i = 1; i < sets.size(); ++i) {
    if (sets[i].horizon != out.horizon) throw std::invalid_argument("intersect: mismatched horizons");
    tmp.clear();
    std::set_intersection(out.points.begin(), out.points.end(), sets[i].points.begin(), sets[i].points.end(),
                          std::back_inserter(tmp));
    out.points.swap(tmp);
  }
  return out;
}

std::int64_t next_meeting(const EpochLaw& law, int walks, std::int64_t horizon, Rng& rng) {
  constexpr int kMaxWalks = 32;
  if (walks < 1 || walks > kMaxWalks) throw std::invalid_argument("next_meeting: unsupported walk count");
  std::array<std::int64_t, kMaxWalks> pos{};
  for (int i = 0; i < walks; ++i) pos[i] = law.sample(rng);
  for (;;) {
    std::int64_t mx = pos[0];
    for (int i = 1; i < walks; ++i) mx = std::max(mx, pos[i]);
    if (mx > horizon) return horizon + 1;
    bool met = true;
    for (int i = 0; i < walks; ++i) {
      while (pos[i] < mx) pos[i] += law.sample(rng);
      met = met && pos[i] == mx;
    }
    if (met) return mx;
  }
}

std::vector<Estimate> escape_probability_curve(const MemoryParams& mem, const EpochLaw& law,
                                               std::span<const std::int64_t> horizons, std::int64_t reps,
                                               Rng& rng) {
  if (horizons.empty() || reps < 1) throw std::invalid_argument("escape_probability: need horizons and reps >= 1");
  const std::int64_t hmax = *std::max_element(horizons.begin(), horizons.end());
  if (*std::min_element(horizons.begin(), horizons.end()) < 1) throw std::invalid_argument("horizon must be >= 1");
  const std::uint64_t base = rng.next();
  std::vector<std::int64_t> escapes(horizons.size(), 0);
  for (std::int64_t r = 0; r < reps; ++r) {
    Rng local = replica_stream(base, static_cast<std::uint64_t>(r));
    const std::int64_t g = next_meeting(law, mem.m() + 1, hmax, local);
    for (std::size_t i = 0; i < horizons.size(); ++i) escapes[i] += g > horizons[i] ? 1 : 0;
  }
  std::vector<Estimate> out;
  for (std::int64_t e : escapes) {
    const double p = static_cast<double>(e) / static_cast<double>(reps);
    out.push_back({p, binomial_se(p, reps), reps});
  }
  return out;
}

Estimate escape_probability_mc(const MemoryParams& mem, const EpochLaw& law, std::int64_t horizon,
                               std::int64_t reps, Rng& rng) {
  const std::int64_t h[1] = {horizon};
  return escape_probability_curve(mem, law, h, reps, rng).front();
}

namespace {

// One walker from target[i]: does it avoid target[i+1..] up to `reach`?
bool walker_escapes(const EpochLaw& law, std::span<const std::int64_t> target, std::size_t i, std::int64_t reach,
                    Rng& rng) {
  const std::int64_t limit = std::min(reach, target.back());
  std::size_t idx = i + 1;
  std::int64_t pos = target[i];
  for (;;) {
    pos += law.sample(rng);
    if (pos > limit) return true;
    while (target[idx] < pos) ++idx;
    if (target[idx] == pos) return false;
  }
}

}  // namespace

double capacity_mc(const ReturnSet& target, const EpochLaw& law, int reps_per_point, Rng& rng) {
  if (target.empty()) throw std::invalid_argument("capacity_mc: empty target");
  if (reps_per_point < 1) throw std::invalid_argument("capacity_mc: reps_per_point must be >= 1");
  const auto& pts = target.points;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i + 1 == pts.size()) {
      total += 1.0;
      continue;
    }
    int esc = 0;
    for (int r = 0; r < reps_per_point; ++r) esc += walker_escapes(law, pts, i, pts.back(), rng) ? 1 : 0;
    total += static_cast<double>(esc) / reps_per_point;
  }
  return total;
}

RenewalMass::RenewalMass(const EpochLaw& law, std::int64_t max_distance) {
  if (max_distance < 0) throw std::invalid_argument("RenewalMass: negative bound");
  const auto size = static_cast<std::size_t>(max_distance + 1);
  std::vector<double> f(size, 0.0);
  for (std::size_t k = 1; k < size; ++k) f[k] = law.pmf(static_cast<std::int64_t>(k));
  u_.assign(size, 0.0);
  u_[0] = 1.0;
  for (std::size_t d = 1; d < size; ++d) {
    double s = 0.0;
    for (std::size_t k = 1; k <= d; ++k) s += f[k] * u_[d - k];
    u_[d] = s;
  }
}

namespace {

// c(k) = P(k in every set) and v(d) = u(d)^s, d = 0..n.
void common_point_tables(const EpochLaw& law, int sets, std::int64_t n, std::vector<double>& c, std::vector<double>& v) {
  if (sets < 1) throw std::invalid_argument("finite intersection law: sets must be >= 1");
  if (n < 0) throw std::invalid_argument("finite intersection law: negative horizon");
  const RenewalMass u(law, n);
  const auto size = static_cast<std::size_t>(n + 1);
  const double w = wandering_rate(law, n);
  c.assign(size, 0.0);
  v.assign(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    double a = 0.0;
    for (std::size_t j = 0; j <= k; ++j) a += law.tail(static_cast<std::int64_t>(j)) * u(static_cast<std::int64_t>(k - j));
    c[k] = std::pow(a / w, sets);
    v[k] = std::pow(u(static_cast<std::int64_t>(k)), sets);
  }
}

// Law of the first common point inside [first, last]: c(k) = sum_j f(j) v(k - j).
std::vector<double> first_common_point(const std::vector<double>& c, const std::vector<double>& v, std::int64_t first,
                                       std::int64_t last) {
  std::vector<double> f(c.size(), 0.0);
  for (std::int64_t k = first; k <= last; ++k) {
    double s = c[static_cast<std::size_t>(k)];
    for (std::int64_t j = first; j < k; ++j) s -= f[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k - j)];
    f[static_cast<std::size_t>(k)] = s;
  }
  return f;
}

}  // namespace

double intersection_prob_finite(const EpochLaw& law, int sets, std::int64_t n) {
  std::vector<double> c, v;
  common_point_tables(law, sets, n, c, v);
  const auto f = first_common_point(c, v, 0, n);
  return std::accumulate(f.begin(), f.end(), 0.0);
}

double conditional_count_finite(const EpochLaw& law, int sets, std::int64_t n, const Interval& b) {
  const LatticeWindow win = b.lattice(n);
  if (win.empty()) throw std::invalid_argument("conditional_count_finite: empty window");
  std::vector<double> c, v;
  common_point_tables(law, sets, n, c, v);
  const auto f = first_common_point(c, v, win.first, win.last);
  double mass = 0.0;
  double count = 0.0;
  for (std::int64_t k = win.first; k <= win.last; ++k) {
    mass += f[static_cast<std::size_t>(k)];
    count += c[static_cast<std::size_t>(k)];
  }
  return count / mass;
}

double capacity_exact(const ReturnSet& target, const RenewalMass& u) {
  if (target.empty()) throw std::invalid_argument("capacity_exact: empty target");
  const auto& a = target.points;
  if (a.back() - a.front() > u.max_distance()) throw std::invalid_argument("capacity_exact: renewal table too short");
  const std::size_t k = a.size();
  std::vector<double> f(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    // f[j]: probability that the first visit to a[i+1..] happens at a[j].
    double hit = 0.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      double v = u(a[j] - a[i]);
      for (std::size_t l = i + 1; l < j; ++l) v -= f[l] * u(a[j] - a[l]);
      f[j] = v;
      hit += v;
    }
    total += 1.0 - hit;
  }
  return total;
}

double capacity_ratio_sample(const MemoryParams& mem, const EpochLaw& law, std::int64_t n, std::int64_t horizon,
                             Rng& rng) {
  if (n < 1 || horizon < 1) throw std::invalid_argument("capacity_ratio_sample: n and horizon must be >= 1");
  std::vector<std::int64_t> pts(static_cast<std::size_t>(n));
  pts[0] = 0;
  for (std::int64_t i = 1; i < n; ++i) {
    pts[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(i - 1)] + next_meeting(law, mem.m(), horizon, rng);
  }
  std::int64_t escapes = 1;  // the last point always escapes
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    escapes += walker_escapes(law, pts, i, pts[i] + horizon, rng) ? 1 : 0;
  }
  return static_cast<double>(escapes) / static_cast<double>(n);
}

std::vector<CapacityLlnRecord> capacity_lln_experiment(const MemoryParams& mem, const EpochLaw& law,
                                                       std::span<const std::int64_t> n_grid, std::int64_t reps,
                                                       std::int64_t horizon, std::uint64_t seed) {
  if (reps < 2) throw std::invalid_argument("capacity_lln_experiment: need reps >= 2");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) throw std::invalid_argument("n grid must be increasing");
  std::vector<CapacityLlnRecord> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::vector<double> ratios(static_cast<std::size_t>(reps));
    for (std::int64_t r = 0; r < reps; ++r) {
      Rng rng = replica_stream(derive_seed(seed, g), static_cast<std::uint64_t>(r));
      ratios[static_cast<std::size_t>(r)] = capacity_ratio_sample(mem, law, n_grid[g], horizon, rng);
    }
    const Summary s = summarize(ratios);
    out.push_back({n_grid[g], s.mean, s.stdev, s.std_error, *std::min_element(ratios.begin(), ratios.end()),
                   *std::max_element(ratios.begin(), ratios.end()), reps});
  }
  return out;
}

std::optional<PnEll> conditional_pn_and_elln(const MemoryParams& mem, const WindowSampler& window,
                                             const Interval& b, Rng& rng, const PnEllOptions& opts) {
  std::vector<ReturnSet> sets;
  sets.reserve(static_cast<std::size_t>(mem.m()));
  for (int j = 0; j < mem.m(); ++j) sets.push_back(window.sample(rng));
  const ReturnSet k = intersect(sets).restricted(b);
  if (k.empty()) return std::nullopt;
  PnEll out;
  out.intersection_size = k.size();
  out.p_n = capacity_mc(k, window.law(), opts.capacity_reps_per_point, rng) / window.wandering_rate();
  std::int64_t j = mem.m() + 1;
  while (!window.sample_hits(rng, k.points)) {
    if (++j - mem.m() > opts.max_search) throw std::runtime_error("conditional_pn_and_elln: search cap reached");
  }
  out.ell_n = j;
  return out;
}

}  // namespace lrdx
