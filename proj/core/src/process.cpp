#include "lrdx/process.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "lrdx/stats.hpp"

namespace lrdx {

NormSeq process_norming(const TailModel& model, const MemoryParams& mem, const EpochLaw& law, std::int64_t n) {
  const double w = wandering_rate(law, n);
  if (!(model.quantile_V(w) > model.threshold())) throw std::domain_error("horizon too small: V(w_n) vanishes");
  NormSeq norm = lrd_norming(model, mem, w, theta_n(mem, law, n));
  norm.n = n;
  const double nd = static_cast<double>(n);
  if (nd >= 2.0 && nd > model.z0() && model.quantile_V(nd) > model.threshold()) {
    const GumbelNorming iid = iid_gumbel_norming(model, nd);
    norm.iid_a = iid.a;
    norm.iid_b = iid.b;
  }
  return norm;
}

ProcessSetup::ProcessSetup(const TailModel& model, const MemoryParams& mem, std::int64_t n)
    : model_(model), mem_(mem), window_(EpochLaw(mem.beta()), n), norm_(process_norming(model, mem, window_.law(), n)) {
  if (n < 1) throw std::invalid_argument("process horizon must be >= 1");
}

ProcessPath sample_process(const ProcessSetup& setup, Rng& rng) {
  const std::int64_t n = setup.horizon();
  const double w = setup.norm().w_n;
  const double cutoff = setup.model().scale() * w;
  ProcessPath path;
  path.n = n;
  path.norm = setup.norm();
  path.values.assign(static_cast<std::size_t>(n + 1), 0.0);
  double gamma = 0.0;
  for (;;) {
    gamma += rng.exponential();
    // Later terms have w/gamma <= z0 and V vanishes there.
    if (gamma >= cutoff) break;
    Atom a;
    a.gamma = gamma;
    a.magnitude = setup.model().quantile_V(w / gamma);
    a.set = setup.window().sample(rng);
    for (std::int64_t t : a.set.points) path.values[static_cast<std::size_t>(t)] += a.magnitude;
    path.atoms.push_back(std::move(a));
  }
  return path;
}

ProcessPath sample_process(const TailModel& model, const MemoryParams& mem, const EpochLaw& law, std::int64_t n,
                           Rng& rng) {
  if (std::fabs(law.beta() - mem.beta()) > 1e-12) throw std::invalid_argument("sample_process: epoch law beta mismatch");
  return sample_process(ProcessSetup(model, mem, n), rng);
}

std::vector<double> reconstruct_values(const ProcessPath& path) {
  std::vector<double> x(static_cast<std::size_t>(path.n + 1), 0.0);
  for (const Atom& a : path.atoms)
    for (std::int64_t t : a.set.points) x[static_cast<std::size_t>(t)] += a.magnitude;
  return x;
}

double empirical_M(const ProcessPath& path, const Interval& b) {
  const LatticeWindow w = b.lattice(path.n);
  if (w.empty()) throw std::invalid_argument("empirical_M: interval has no lattice points at this n");
  return *std::max_element(path.values.begin() + w.first, path.values.begin() + w.last + 1);
}

std::vector<double> empirical_extremal(const ProcessPath& path, std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  double running = 0.0;
  std::int64_t next = 0;
  double prev = 0.0;
  for (double t : grid) {
    if (!(t > 0.0 && t <= 1.0) || t < prev) throw std::invalid_argument("empirical_extremal: grid must increase within (0,1]");
    prev = t;
    const std::int64_t last = Interval::closed(0.0, t).lattice(path.n).last;
    for (; next <= last; ++next) running = std::max(running, path.values[static_cast<std::size_t>(next)]);
    out.push_back(running);
  }
  return out;
}

double default_delta0(const MemoryParams& mem) { return (1.0 - mem.beta() - 1.0 / (mem.m() + 1)) / 2.0; }

namespace {

bool meets(const std::vector<std::int64_t>& set, const std::vector<std::int64_t>& target) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < set.size() && j < target.size()) {
    if (set[i] == target[j]) return true;
    if (set[i] < target[j]) ++i; else ++j;
  }
  return false;
}

}  // namespace

LowerBoundReport lower_bound_stat(const ProcessPath& path, const ProcessSetup& setup, const Interval& b,
                                  const LowerBoundOptions& opts, Rng& rng) {
  const int m = setup.mem().m();
  const double delta0 = opts.delta0 > 0.0 ? opts.delta0 : default_delta0(setup.mem());
  if (!(delta0 > 0.0 && delta0 < 1.0 - setup.mem().beta() - 1.0 / (m + 1))) {
    throw std::invalid_argument("lower_bound_stat: delta0 outside (0, 1-beta-1/(m+1))");
  }
  LowerBoundReport rep;
  rep.index_cap = opts.index_cap > 0
                      ? opts.index_cap
                      : std::max<std::int64_t>(m, static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(path.n), delta0))));
  const LatticeWindow win = b.lattice(path.n);
  if (win.empty()) throw std::invalid_argument("lower_bound_stat: interval has no lattice points at this n");

  // Sets indexed beyond the atom list carry magnitude 0.
  std::vector<const std::vector<std::int64_t>*> sets;
  std::vector<double> mags;
  std::vector<std::vector<std::int64_t>> fresh;
  fresh.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, rep.index_cap - static_cast<std::int64_t>(path.atoms.size()))));
  for (std::int64_t j = 0; j < rep.index_cap; ++j) {
    if (j < static_cast<std::int64_t>(path.atoms.size())) {
      sets.push_back(&path.atoms[static_cast<std::size_t>(j)].set.points);
      mags.push_back(path.atoms[static_cast<std::size_t>(j)].magnitude);
    } else {
      fresh.push_back(setup.window().sample(rng).points);
      sets.push_back(&fresh.back());
      mags.push_back(0.0);
    }
  }

  const auto width = static_cast<std::size_t>(win.size());
  std::vector<int> count(width, 0);
  std::vector<std::int64_t> first(width * static_cast<std::size_t>(m), -1);
  for (std::size_t j = 0; j < sets.size(); ++j) {
    for (std::int64_t t : *sets[j]) {
      if (t < win.first || t > win.last) continue;
      const auto i = static_cast<std::size_t>(t - win.first);
      if (count[i] < m) first[i * m + static_cast<std::size_t>(count[i])] = static_cast<std::int64_t>(j);
      ++count[i];
    }
  }
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < width; ++i) {
    if (count[i] < m) continue;
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += mags[static_cast<std::size_t>(first[i * m + k])];
    if (s > best) {
      best = s;
      best_i = i;
    }
  }
  if (best < 0.0) return rep;

  rep.finite = true;
  for (int k = 0; k < m; ++k) {
    const auto j = static_cast<std::size_t>(first[best_i * m + k]);
    rep.j_star.push_back(static_cast<std::int64_t>(j) + 1);
    rep.top_magnitudes.push_back(mags[j]);
  }
  // Pinned intersection nB cap I_{j*_1} cap ... cap I_{j*_m}.
  std::vector<std::int64_t> pinned;
  for (std::int64_t t = win.first; t <= win.last; ++t) {
    const auto i = static_cast<std::size_t>(t - win.first);
    if (count[i] < m) continue;
    bool all = true;
    for (int k = 0; k < m && all; ++k) all = std::binary_search(sets[static_cast<std::size_t>(rep.j_star[k] - 1)]->begin(),
                                                                 sets[static_cast<std::size_t>(rep.j_star[k] - 1)]->end(), t);
    if (all) pinned.push_back(t);
  }

  const std::int64_t start = rep.j_star.back();  // 1-based index of j*_m; search from the next one
  for (std::int64_t j = start; j < static_cast<std::int64_t>(sets.size()); ++j) {
    if (meets(*sets[static_cast<std::size_t>(j)], pinned)) {
      rep.j_extra = j + 1;
      rep.extra_magnitude = mags[static_cast<std::size_t>(j)];
      break;
    }
  }
  if (!rep.j_extra) {
    for (std::int64_t j = std::max<std::int64_t>(start, static_cast<std::int64_t>(sets.size()));
         j < static_cast<std::int64_t>(path.atoms.size()); ++j) {
      if (meets(path.atoms[static_cast<std::size_t>(j)].set.points, pinned)) {
        rep.j_extra = j + 1;
        rep.extra_magnitude = path.atoms[static_cast<std::size_t>(j)].magnitude;
        break;
      }
    }
  }
  if (!rep.j_extra) {
    // Past the series truncation every term is exactly 0; only the index matters.
    std::int64_t j = std::max<std::int64_t>({start, static_cast<std::int64_t>(sets.size()),
                                             static_cast<std::int64_t>(path.atoms.size())});
    for (std::int64_t k = 0; k < opts.max_fresh; ++k, ++j) {
      if (setup.window().sample_hits(rng, pinned)) {
        rep.j_extra = j + 1;
        break;
      }
    }
  }
  rep.value = best + rep.extra_magnitude;
  return rep;
}

BigJumpSummary big_jump_report(const LowerBoundReport& report, const ProcessSetup& setup) {
  if (!report.finite) throw std::invalid_argument("big_jump_report: lower bound has no admissible tuple");
  const double vw = setup.model().quantile_V(setup.norm().w_n);
  const double vt = setup.model().quantile_V(setup.norm().theta_n);
  BigJumpSummary s;
  for (double mag : report.top_magnitudes) s.top_over_vw.push_back(mag / vw);
  s.extra_over_vtheta = vt > 0.0 ? report.extra_magnitude / vt : 0.0;
  s.extra_over_vw = report.extra_magnitude / vw;
  return s;
}

double sample_marginal_x0(const TailModel& model, Rng& rng) {
  double x = 0.0;
  double g = 0.0;
  for (;;) {
    g += rng.exponential();
    if (g >= model.scale()) return x;
    x += model.quantile_V(1.0 / g);
  }
}

double sample_remainder_x0(const TailModel& model, double w_n, std::int64_t first_index, Rng& rng) {
  if (first_index < 1) throw std::invalid_argument("sample_remainder_x0: first index must be >= 1");
  const double cutoff = model.scale() * w_n;
  double g = 0.0;
  for (std::int64_t j = 0; j < first_index; ++j) g += rng.exponential();
  if (g >= cutoff) return 0.0;
  double sum = 0.0;
  if (rng.uniform() * w_n < 1.0) sum += model.quantile_V(w_n / g);
  // Remaining arrivals covering 0 form a Poisson stream of rate 1/w_n.
  for (;;) {
    g += w_n * rng.exponential();
    if (g >= cutoff) return sum;
    sum += model.quantile_V(w_n / g);
  }
}

double remainder_mean_integral(const TailModel& model, double w_n, std::int64_t first_index) {
  if (first_index < 1) throw std::invalid_argument("remainder_mean_integral: first index must be >= 1");
  const double cutoff = model.scale() * w_n;
  // u = cutoff * exp(-s) maps (0, cutoff) onto s > 0.
  auto f = [&](double s) {
    const double u = cutoff * std::exp(-s);
    const double weight = first_index == 1 ? 1.0 : boost::math::gamma_p(static_cast<double>(first_index - 1), u);
    return model.quantile_V(w_n / u) * weight * u;
  };
  double total = 0.0;
  const double cuts[] = {0.0, 5.0, 20.0, 60.0, 200.0, 700.0};
  for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-12);
  }
  return total / w_n;
}

RemainderCheck remainder_tail_check(const TailModel& model, const MemoryParams& mem, const EpochLaw& law,
                                    std::int64_t n, double epsilon, double r, std::int64_t replicas,
                                    std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("remainder_tail_check: epsilon must be positive");
  if (!(r > 0.0 && r < 1.0 - mem.beta())) throw std::invalid_argument("remainder_tail_check: r outside (0, 1-beta)");
  if (replicas < 1) throw std::invalid_argument("remainder_tail_check: replicas must be >= 1");
  RemainderCheck out;
  out.n = n;
  out.replicas = replicas;
  const double w = wandering_rate(law, n);
  out.first_index = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), r)));
  out.threshold = epsilon * model.quantile_V(w);
  std::vector<double> sums(static_cast<std::size_t>(replicas));
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < replicas; ++i) {
    Rng rng = replica_stream(seed, static_cast<std::uint64_t>(i));
    const double s = sample_remainder_x0(model, w, out.first_index, rng);
    sums[static_cast<std::size_t>(i)] = s;
    hits += s >= out.threshold ? 1 : 0;
  }
  out.frequency = static_cast<double>(hits) / static_cast<double>(replicas);
  out.frequency_se = binomial_se(out.frequency, replicas);
  out.scaled = static_cast<double>(n) * out.frequency;
  out.mean = summarize(sums).mean;
  out.mean_se = batch_means_se(sums);
  out.mean_oracle = remainder_mean_integral(model, w, out.first_index);
  return out;
}

}  // namespace lrdx
