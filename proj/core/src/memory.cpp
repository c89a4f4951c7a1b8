#include "lrdx/memory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lrdx {

int ell_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("ell_beta: beta must lie in (0,1)");
  const double bound = 1.0 / (1.0 - beta);
  double l = std::floor(bound);
  // Strict inequality; snap near-integers so 1/(1-0.75) counts as 4.
  if (std::fabs(bound - std::round(bound)) <= 1e-12 * bound) l = std::round(bound) - 1.0;
  return static_cast<int>(l);
}

bool MemoryParams::admissible(int m, double beta) {
  if (m < 2) return false;
  const double lo = static_cast<double>(m - 1) / m;
  const double hi = static_cast<double>(m) / (m + 1);
  return beta > lo && beta < hi;
}

MemoryParams::MemoryParams(int m, double beta) : m_(m), beta_(beta) {
  if (!admissible(m, beta)) {
    throw std::invalid_argument("memory parameter beta=" + std::to_string(beta) + " not admissible for m=" +
                                std::to_string(m) + " (need (m-1)/m < beta < m/(m+1))");
  }
  if (ell() != m) throw std::logic_error("ell_beta differs from m inside the admissible range");
}

}  // namespace lrdx
