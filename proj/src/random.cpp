#include "fracwave/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fracwave {

SampledPath band_limited_path(const TimeGrid& grid, std::uint64_t seed, bool vanish_at_zero,
                              int modes) {
  Rng rng(seed);
  std::vector<double> sine(modes), cosine(modes);
  for (int k = 0; k < modes; ++k) sine[k] = rng.uniform(-1.0, 1.0) / (k + 1);
  double offset = 0.0;
  if (!vanish_at_zero) {
    offset = rng.uniform(-1.0, 1.0);
    for (int k = 0; k < modes; ++k) cosine[k] = rng.uniform(-1.0, 1.0) / (k + 1);
  }
  const double omega = std::numbers::pi / grid.t_max();
  return SampledPath::from_function(grid, [&](double t) {
    double v = offset;
    for (int k = 0; k < modes; ++k) {
      const double arg = (k + 1) * omega * t;
      v += sine[k] * std::sin(arg);
      if (!vanish_at_zero) v += cosine[k] * std::cos(arg);
    }
    return v;
  });
}

}  // namespace fracwave
