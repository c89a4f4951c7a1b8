#include "lrdx/interval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrdx {

namespace {

// n * x, snapped to the nearest integer when it is within rounding noise of it
// (0.7 * 10000 must land on 7000).
double snapped(std::int64_t n, double x) {
  const double v = static_cast<double>(n) * x;
  const double r = std::round(v);
  return std::fabs(v - r) <= 1e-9 * std::max(1.0, std::fabs(v)) ? r : v;
}

}  // namespace

Interval::Interval(double lo, double hi, bool lo_closed, bool hi_closed)
    : lo_(lo), hi_(hi), lo_closed_(lo_closed), hi_closed_(hi_closed) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi > 1.0) {
    throw std::invalid_argument("interval must lie in [0,1]");
  }
  const bool degenerate_ok = lo_closed && hi_closed;
  if (degenerate_ok ? lo > hi : lo >= hi) throw std::invalid_argument("interval endpoints out of order");
}

Interval Interval::open(double lo, double hi) { return Interval(lo, hi, false, false); }
Interval Interval::closed(double lo, double hi) { return Interval(lo, hi, true, true); }

LatticeWindow Interval::lattice(std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("negative lattice resolution");
  const double l = snapped(n, lo_);
  const double h = snapped(n, hi_);
  LatticeWindow w;
  w.first = static_cast<std::int64_t>(lo_closed_ ? std::ceil(l) : std::floor(l) + 1.0);
  w.last = static_cast<std::int64_t>(hi_closed_ ? std::floor(h) : std::ceil(h) - 1.0);
  w.first = std::max<std::int64_t>(w.first, 0);
  w.last = std::min<std::int64_t>(w.last, n);
  return w;
}

Interval Interval::scaled(double a) const {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("scale factor must lie in (0,1]");
  return Interval(lo_ * a, hi_ * a, lo_closed_, hi_closed_);
}

}  // namespace lrdx
