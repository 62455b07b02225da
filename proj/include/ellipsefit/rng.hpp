#pragma once

#include <cstdint>
#include <random>

namespace ellipsefit {

/// splitmix64 output mix; full-period permutation of the state increment.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent stream seed derived from a master seed. Parallel consumers of
/// distinct streams reproduce the serial results exactly.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// mt19937_64 with explicit value mappings, so every draw is reproducible
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch only).
  double gaussian();

  double gaussian(double sigma) { return sigma * gaussian(); }

  /// Uniform integer in [lo, hi], both inclusive.
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ellipsefit
