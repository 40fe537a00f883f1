#pragma once

#include <cstdint>
#include <random>

#include "fracwave/grid.hpp"

namespace fracwave {

/// Seeded generator with a portable uniform mapping (the std distributions
/// are implementation-defined, which would break cross-platform replay).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// A 53-bit seed for a child generator.
  std::uint64_t derive_seed() { return static_cast<std::uint64_t>(uniform() * 0x1.0p53); }

 private:
  std::mt19937_64 engine_;
};

/// Smooth pseudorandom scalar path: a finite sine series (plus, unless
/// `vanish_at_zero`, a constant and cosine part) with coefficients decaying
/// like 1/k. Deterministic in `seed`.
SampledPath band_limited_path(const TimeGrid& grid, std::uint64_t seed, bool vanish_at_zero,
                              int modes = 6);

}  // namespace fracwave
