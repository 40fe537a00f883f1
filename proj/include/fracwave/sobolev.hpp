#pragma once

#include <cstdint>

#include "fracwave/fracops.hpp"
#include "fracwave/grid.hpp"

namespace fracwave::fracops {

enum class NormFlavor {
  Plain,      ///< H^gamma(0,T)
  ZeroTrace,  ///< H_gamma(0,T): zero initial trace, t^{-1} weight at gamma = 1/2
};

/// Discrete Sobolev-Slobodecki norm of a (possibly vector-valued) path.
///
/// For gamma = l + theta the squared norm is ||u||_{H^l}^2 plus, when
/// theta > 0, the H^theta (or H_theta) norm of the l-th derivative; for l = 0
/// it is ||u||_{L2}^2 plus the theta-seminorm. L2 terms use the trapezoid
/// rule, the double integral a midpoint rule over off-diagonal cells, and
/// derivatives second-order finite differences.
double sobolev_slobodecki_norm(double gamma, const SampledPath& path, NormFlavor flavor,
                               double tol_zero = kTolZero);

/// Trapezoid L2(0,T) norm, summed over components.
double l2_norm(const SampledPath& path);

/// Derivative of every component by second-order finite differences.
SampledPath finite_difference_derivative(const SampledPath& path);

struct RatioReport {
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

/// Extremal ratios ||J^gamma v||_{H_gamma} / ||v||_{L2} over pseudorandom
/// band-limited paths v drawn from `seed`.
RatioReport norm_equivalence_probe(FracOrder gamma, std::size_t sample_count,
                                   const TimeGrid& grid, std::uint64_t seed);

}  // namespace fracwave::fracops
