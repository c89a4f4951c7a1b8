#pragma once

namespace lrdx {

// Largest integer l with l < 1/(1-beta) (strict, so beta=3/4 gives 3).
int ell_beta(double beta);

// Memory parameter of the process: m-fold intersections are the relevant
// ones, which requires (m-1)/m < beta < m/(m+1).
class MemoryParams {
 public:
  MemoryParams(int m, double beta);

  int m() const { return m_; }
  double beta() const { return beta_; }
  double beta_star() const { return m_ * beta_ - (m_ - 1); }
  int ell() const { return ell_beta(beta_); }

  static bool admissible(int m, double beta);

 private:
  int m_;
  double beta_;
};

}  // namespace lrdx
