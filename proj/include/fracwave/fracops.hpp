#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracwave/grid.hpp"

namespace fracwave::fracops {

/// Product-trapezoidal weights for the Riemann-Liouville integral J^gamma on
/// a uniform grid: the integrand is replaced by its piecewise-linear
/// interpolant and the kernel (t-s)^{gamma-1}/Gamma(gamma) integrated exactly.
///
/// The table is Toeplitz apart from its first column, so it is stored as
///   w_{n,0} = scale * first[n],  w_{n,j} = scale * interior[n-j],  w_{n,n} = scale
/// with scale = tau^gamma / Gamma(gamma + 2).
class ConvolutionWeights {
 public:
  ConvolutionWeights(FracOrder gamma, TimeGrid grid);

  FracOrder order() const noexcept { return gamma_; }
  const TimeGrid& grid() const noexcept { return grid_; }

  /// w_{n,i}; zero when i > n.
  double weight(std::size_t n, std::size_t i) const noexcept;
  /// w_{n,n} for n >= 1 (identical on every row).
  double endpoint() const noexcept { return scale_; }
  double scale() const noexcept { return scale_; }

  /// Sum of row n, compensated.
  double row_sum(std::size_t n) const;

  /// (J^gamma f)(t_n) for scalar samples f_0..f_n (only the first n+1 are read).
  double apply_at(std::size_t n, std::span<const double> samples) const;
  /// J^gamma f at every node.
  std::vector<double> apply(std::span<const double> samples) const;

  /// Contribution of nodes 0..n-1 to row n, for vector-valued samples stored
  /// node-major with `dim` components; the result is added into `out`.
  void accumulate_history(std::size_t n, std::span<const double> samples, std::size_t dim,
                          std::span<double> out) const;

 private:
  FracOrder gamma_;
  TimeGrid grid_;
  double scale_;
  std::vector<double> first_;     // indexed by n
  std::vector<double> interior_;  // indexed by k = n - j, k >= 1
};

ConvolutionWeights build_weights(FracOrder gamma, const TimeGrid& grid);

/// J^gamma applied componentwise. gamma = 0 returns the path unchanged.
SampledPath frac_integral(FracOrder gamma, const SampledPath& path);
/// Same, with precomputed weights; throws GridMismatch if the grids differ.
SampledPath frac_integral(const ConvolutionWeights& weights, const SampledPath& path);

/// Default tolerance for initial-trace checks, relative to max |path|.
inline constexpr double kTolZero = 1e-10;

/// Discrete Caputo derivative d^m/dt^m J^{m-gamma} of a path in H_gamma:
///  - gamma in (0,1): L1 scheme, i.e. the exact derivative at each node of the
///    product-integrated J^{1-gamma} of the piecewise-linear interpolant;
///  - gamma = 1: backward differences;
///  - gamma in (1,2]: second differences of J^{2-gamma} (central inside,
///    one-sided at both ends).
/// Node 0 always comes from a one-sided rule and is the least accurate value.
/// For gamma > 1/2 the path must vanish at t = 0 (InitialConditionViolation).
SampledPath caputo_derivative(FracOrder gamma, const SampledPath& path,
                              double tol_zero = kTolZero);

}  // namespace fracwave::fracops
