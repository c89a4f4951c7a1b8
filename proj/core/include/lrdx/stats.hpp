#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lrdx/rng.hpp"

namespace lrdx {

struct Summary {
  double mean = 0;
  double stdev = 0;
  double std_error = 0;
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);
double binomial_se(double p, std::int64_t n);
// Standard error of the mean from contiguous batch means.
double batch_means_se(std::span<const double> values, int batches = 100);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

// Sup distance between the ECDF and a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
// Sup distance between two ECDFs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
double ks_pvalue(double d, std::size_t n);
double ks_permutation_pvalue(std::span<const double> a, std::span<const double> b, int permutations, Rng& rng);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

// Pearson goodness of fit; `expected` are expected counts with the same total.
// Cells are merged from the right until each expected count reaches min_expected.
ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                         double min_expected = 5.0, int fitted_parameters = 0);

using Point2 = std::array<double, 2>;
// Sample energy distance E|X-Y| - (E|X-X'| + E|Y-Y'|)/2 (V-statistic).
double energy_distance(std::span<const Point2> x, std::span<const Point2> y);

}  // namespace lrdx
