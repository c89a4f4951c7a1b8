#include "lrdx/rng.hpp"

#include <cmath>
#include <numbers>

namespace lrdx {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() {
  // Box-Muller, one variate per call: keeps the stream position a pure
  // function of the number of calls.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gumbel() { return -std::log(exponential()); }

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t Rng::poisson(double mean) {
  // Counting unit exponential arrivals; only used for moderate means.
  std::int64_t k = 0;
  double t = exponential();
  while (t < mean) {
    ++k;
    t += exponential();
  }
  return k;
}

}  // namespace lrdx
