#include "lrdx/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lrdx {

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  // Welford keeps the variance stable for large n.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }
  s.mean = mean;
  s.stdev = k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1)) : 0.0;
  s.std_error = s.stdev / std::sqrt(static_cast<double>(k));
  return s;
}

double binomial_se(double p, std::int64_t n) {
  if (n <= 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

double batch_means_se(std::span<const double> values, int batches) {
  if (batches < 2) throw std::invalid_argument("batch_means_se: need at least two batches");
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(batches)) return summarize(values).std_error;
  const std::size_t size = n / static_cast<std::size_t>(batches);
  std::vector<double> means(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(b * size);
    means[static_cast<std::size_t>(b)] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) / size;
  }
  return summarize(means).stdev / std::sqrt(static_cast<double>(batches));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return std::min(1.0, d);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ks_pvalue: n must be positive");
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_permutation_pvalue(std::span<const double> a, std::span<const double> b, int permutations, Rng& rng) {
  if (permutations < 1) throw std::invalid_argument("ks_permutation_pvalue: permutations must be >= 1");
  const double observed = ks_two_sample({a.begin(), a.end()}, {b.begin(), b.end()});
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  int at_least = 0;
  for (int p = 0; p < permutations; ++p) {
    // Fisher-Yates with the library's own bounded draws (reproducible).
    for (std::size_t i = pooled.size() - 1; i > 0; --i) std::swap(pooled[i], pooled[rng.below(i + 1)]);
    std::vector<double> x(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(a.size()));
    std::vector<double> y(pooled.begin() + static_cast<std::ptrdiff_t>(a.size()), pooled.end());
    if (ks_two_sample(std::move(x), std::move(y)) >= observed - 1e-12) ++at_least;
  }
  return (1.0 + at_least) / (1.0 + permutations);
}

ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> expected, double min_expected,
                         int fitted_parameters) {
  if (observed.size() != expected.size() || observed.empty()) throw std::invalid_argument("chi_square_gof: size mismatch");
  std::vector<double> o;
  std::vector<double> e;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += expected[i];
    if (acc_e >= min_expected) {
      o.push_back(acc_o);
      e.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e.empty()) {
      o.push_back(acc_o);
      e.push_back(acc_e);
    } else {
      o.back() += acc_o;
      e.back() += acc_e;
    }
  }
  ChiSquare out;
  for (std::size_t i = 0; i < o.size(); ++i) out.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  out.dof = static_cast<int>(o.size()) - 1 - fitted_parameters;
  if (out.dof < 1) throw std::invalid_argument("chi_square_gof: not enough cells after merging");
  boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

double energy_distance(std::span<const Point2> x, std::span<const Point2> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("energy_distance: empty sample");
  auto dist = [](const Point2& p, const Point2& q) { return std::hypot(p[0] - q[0], p[1] - q[1]); };
  auto mean_pair = [&](std::span<const Point2> u, std::span<const Point2> v) {
    double s = 0.0;
    for (const auto& p : u)
      for (const auto& q : v) s += dist(p, q);
    return s / (static_cast<double>(u.size()) * static_cast<double>(v.size()));
  };
  return mean_pair(x, y) - 0.5 * (mean_pair(x, x) + mean_pair(y, y));
}

}  // namespace lrdx
