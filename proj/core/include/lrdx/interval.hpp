#pragma once

#include <cstdint>

namespace lrdx {

// Inclusive range of lattice indices; empty when first > last.
struct LatticeWindow {
  std::int64_t first = 0;
  std::int64_t last = -1;
  bool empty() const { return first > last; }
  std::int64_t size() const { return empty() ? 0 : last - first + 1; }
};

// Subinterval of [0,1]; endpoints may be open or closed independently.
class Interval {
 public:
  static Interval open(double lo, double hi);
  static Interval closed(double lo, double hi);
  Interval(double lo, double hi, bool lo_closed, bool hi_closed);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool lo_closed() const { return lo_closed_; }
  bool hi_closed() const { return hi_closed_; }

  // Lattice points t in {0..n} with t/n inside the interval.
  LatticeWindow lattice(std::int64_t n) const;
  // The interval scaled by a (0 < a <= 1), e.g. aB.
  Interval scaled(double a) const;

 private:
  double lo_;
  double hi_;
  bool lo_closed_;
  bool hi_closed_;
};

}  // namespace lrdx
