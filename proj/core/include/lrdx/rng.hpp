#pragma once

#include <cstdint>
#include <random>

namespace lrdx {

std::uint64_t splitmix64(std::uint64_t x);

// Thin wrapper around mt19937_64 with fixed, platform-independent conversions
// (the std distributions are implementation defined, which would break bitwise
// reproducibility across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0,1), 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential();
  double normal();
  double gumbel();
  std::uint64_t below(std::uint64_t bound);
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

// Stream for replica `index` of an experiment with master seed `seed`.
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ splitmix64(index);
}

inline Rng replica_stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(replica_seed(seed, index));
}

// Independent sub-stream keyed by a tag, for components of one replica that
// must not share draws (e.g. prelimit vs limit samples).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag ^ 0x5851f42d4c957f2dULL));
}

}  // namespace lrdx
