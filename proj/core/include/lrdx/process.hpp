#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lrdx/heavy_tails.hpp"
#include "lrdx/interval.hpp"
#include "lrdx/memory.hpp"
#include "lrdx/renewal.hpp"
#include "lrdx/rng.hpp"

namespace lrdx {

// Everything that depends only on (tail, memory, n): shared by all replicas.
class ProcessSetup {
 public:
  ProcessSetup(const TailModel& model, const MemoryParams& mem, std::int64_t n);

  const TailModel& model() const { return model_; }
  const MemoryParams& mem() const { return mem_; }
  const EpochLaw& law() const { return window_.law(); }
  const WindowSampler& window() const { return window_; }
  const NormSeq& norm() const { return norm_; }
  std::int64_t horizon() const { return window_.horizon(); }

 private:
  TailModel model_;
  MemoryParams mem_;
  WindowSampler window_;
  NormSeq norm_;
};

NormSeq process_norming(const TailModel& model, const MemoryParams& mem, const EpochLaw& law, std::int64_t n);

struct Atom {
  double gamma = 0;
  double magnitude = 0;  // V(w_n / gamma)
  ReturnSet set;
};

struct ProcessPath {
  std::int64_t n = 0;
  std::vector<double> values;
  std::vector<Atom> atoms;  // all j with gamma_j < c w_n
  NormSeq norm;
};

ProcessPath sample_process(const ProcessSetup& setup, Rng& rng);
ProcessPath sample_process(const TailModel& model, const MemoryParams& mem, const EpochLaw& law, std::int64_t n,
                           Rng& rng);

// X_t recomputed from the stored atoms (same summation order as the sampler).
std::vector<double> reconstruct_values(const ProcessPath& path);

double empirical_M(const ProcessPath& path, const Interval& b);
// E_n(t) = max{X_i : 0 <= i <= floor(n t)}.
std::vector<double> empirical_extremal(const ProcessPath& path, std::span<const double> grid);

struct LowerBoundOptions {
  double delta0 = 0;           // 0 selects the midpoint of the admissible range
  std::int64_t index_cap = 0;  // 0 selects floor(n^delta0), raised to m
  std::int64_t max_fresh = 1000000;
};

double default_delta0(const MemoryParams& mem);

struct LowerBoundReport {
  bool finite = false;                  // J* exists
  std::vector<std::int64_t> j_star;     // 1-based atom indices, increasing
  std::optional<std::int64_t> j_extra;  // j**; nullopt is the infinity sentinel
  double value = 0;                     // M^lower (0 when J* is infinite)
  std::vector<double> top_magnitudes;
  double extra_magnitude = 0;
  std::int64_t index_cap = 0;
};

LowerBoundReport lower_bound_stat(const ProcessPath& path, const ProcessSetup& setup, const Interval& b,
                                  const LowerBoundOptions& opts, Rng& rng);

struct BigJumpSummary {
  std::vector<double> top_over_vw;  // top-m magnitudes / V(w_n)
  double extra_over_vtheta = 0;     // extra magnitude / V(theta_n)
  double extra_over_vw = 0;         // extra magnitude / V(w_n)
};

BigJumpSummary big_jump_report(const LowerBoundReport& report, const ProcessSetup& setup);

// X_0 alone: atoms covering 0 are a rate-1/w_n thinning of the arrivals, so
// X_0 is compound Poisson with unit arrivals G and magnitudes V(1/G), G < c.
double sample_marginal_x0(const TailModel& model, Rng& rng);

struct RemainderCheck {
  std::int64_t n = 0;
  std::int64_t first_index = 0;  // ceil(n^r)
  double threshold = 0;          // epsilon V(w_n)
  double frequency = 0;          // P(remainder >= threshold)
  double frequency_se = 0;
  double scaled = 0;             // n * frequency
  double mean = 0;               // MC mean of the remainder at 0
  double mean_se = 0;
  double mean_oracle = 0;
  std::int64_t replicas = 0;
};

// Remainder at 0 of the series after the first ceil(n^r) - 1 arrivals.
double sample_remainder_x0(const TailModel& model, double w_n, std::int64_t first_index, Rng& rng);
// E of the same remainder: integral of V(w/u)/w against P(Gamma_{J-1} <= u).
double remainder_mean_integral(const TailModel& model, double w_n, std::int64_t first_index);

RemainderCheck remainder_tail_check(const TailModel& model, const MemoryParams& mem, const EpochLaw& law,
                                    std::int64_t n, double epsilon, double r, std::int64_t replicas,
                                    std::uint64_t seed);

}  // namespace lrdx
