#include "fracwave/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fracwave/error.hpp"
#include "fracwave/random.hpp"

namespace fracwave::fracops {
namespace {

double l2_squared(const SampledPath& path) {
  const double tau = path.grid().step();
  const std::size_t last = path.n_nodes() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k < path.dim(); ++k) {
    double s = 0.5 * (path(0, k) * path(0, k) + path(last, k) * path(last, k));
    for (std::size_t i = 1; i < last; ++i) s += path(i, k) * path(i, k);
    sum += s * tau;
  }
  return sum;
}

// Midpoint double integral of |u(t)-u(s)|^2 / |t-s|^{1+2 theta}, diagonal
// cells excluded.
double seminorm_squared(const SampledPath& path, double theta) {
  const std::size_t cells = path.grid().n_steps();
  const double tau = path.grid().step();
  std::vector<double> kernel(cells, 0.0);
  for (std::size_t d = 1; d < cells; ++d)
    kernel[d] = std::pow(tau, 1.0 - 2.0 * theta) * std::pow(static_cast<double>(d), -1.0 - 2.0 * theta);

  double total = 0.0;
  std::vector<double> mid(cells);
  for (std::size_t k = 0; k < path.dim(); ++k) {
    for (std::size_t i = 0; i < cells; ++i) mid[i] = 0.5 * (path(i, k) + path(i + 1, k));
    for (std::size_t d = 1; d < cells; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i + d < cells; ++i) {
        const double diff = mid[i] - mid[i + d];
        s += diff * diff;
      }
      total += 2.0 * kernel[d] * s;
    }
  }
  return total;
}

// Midpoint rule for int_0^T t^{-1} |u|^2 dt.
double weighted_squared(const SampledPath& path) {
  const std::size_t cells = path.grid().n_steps();
  const double tau = path.grid().step();
  double total = 0.0;
  for (std::size_t k = 0; k < path.dim(); ++k) {
    for (std::size_t i = 0; i < cells; ++i) {
      const double m = 0.5 * (path(i, k) + path(i + 1, k));
      total += tau * m * m / ((static_cast<double>(i) + 0.5) * tau);
    }
  }
  return total;
}

void require_zero_trace(const SampledPath& path, double tol_zero) {
  const double limit = tol_zero * path.max_abs();
  for (std::size_t k = 0; k < path.dim(); ++k) {
    if (std::fabs(path(0, k)) > limit)
      throw Error(ErrorCode::TraceViolation,
                  "zero-trace norm requested but component " + std::to_string(k) +
                      " is " + std::to_string(path(0, k)) + " at t=0");
  }
}

}  // namespace

double l2_norm(const SampledPath& path) { return std::sqrt(l2_squared(path)); }

SampledPath finite_difference_derivative(const SampledPath& path) {
  const std::size_t last = path.n_nodes() - 1;
  const double tau = path.grid().step();
  SampledPath out(path.grid(), path.dim());
  for (std::size_t k = 0; k < path.dim(); ++k) {
    for (std::size_t i = 1; i < last; ++i) out(i, k) = (path(i + 1, k) - path(i - 1, k)) / (2.0 * tau);
    out(0, k) = (-3.0 * path(0, k) + 4.0 * path(1, k) - path(2, k)) / (2.0 * tau);
    out(last, k) = (3.0 * path(last, k) - 4.0 * path(last - 1, k) + path(last - 2, k)) / (2.0 * tau);
  }
  return out;
}

double sobolev_slobodecki_norm(double gamma, const SampledPath& path, NormFlavor flavor,
                               double tol_zero) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidOrder, "Sobolev order must be finite and non-negative");
  const auto whole = static_cast<std::size_t>(std::floor(gamma));
  const double theta = gamma - static_cast<double>(whole);
  if (whole >= 1 && path.grid().n_steps() < 8 * whole)
    throw Error(ErrorCode::InvalidGrid, "need at least " + std::to_string(8 * whole) +
                                            " steps to differentiate " + std::to_string(whole) +
                                            " times");
  if (flavor == NormFlavor::ZeroTrace && gamma > 0.5) require_zero_trace(path, tol_zero);

  double squared = 0.0;
  SampledPath derivative = path;
  for (std::size_t order = 0; order <= whole; ++order) {
    if (order > 0) derivative = finite_difference_derivative(derivative);
    squared += l2_squared(derivative);
  }
  if (theta > 0.0) {
    // for l >= 1 the l-th derivative contributes its full H^theta norm
    if (whole >= 1) squared += l2_squared(derivative);
    squared += seminorm_squared(derivative, theta);
    if (flavor == NormFlavor::ZeroTrace && theta == 0.5) squared += weighted_squared(derivative);
  }
  return std::sqrt(squared);
}

RatioReport norm_equivalence_probe(FracOrder gamma, std::size_t sample_count,
                                   const TimeGrid& grid, std::uint64_t seed) {
  if (sample_count < 10)
    throw Error(ErrorCode::InvalidArgument, "norm equivalence probe needs at least 10 samples");
  if (!(gamma.value() > 0.0))
    throw Error(ErrorCode::InvalidOrder, "norm equivalence probe needs a positive order");
  const ConvolutionWeights weights(gamma, grid);
  RatioReport report;
  report.min = std::numeric_limits<double>::infinity();
  report.max = 0.0;
  Rng seeds(seed);
  for (std::size_t s = 0; s < sample_count; ++s) {
    const auto path_seed = seeds.derive_seed();
    const SampledPath v = band_limited_path(grid, path_seed, false);
    const double denom = l2_norm(v);
    const double numer =
        sobolev_slobodecki_norm(gamma.value(), frac_integral(weights, v), NormFlavor::ZeroTrace);
    const double ratio = numer / denom;
    report.min = std::min(report.min, ratio);
    report.max = std::max(report.max, ratio);
  }
  report.samples = sample_count;
  return report;
}

}  // namespace fracwave::fracops
