#include "fracwave/fracops.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "fracwave/error.hpp"
#include "fracwave/special.hpp"

namespace fracwave::fracops {
namespace {

// sum_{m >= 2} C(p, m) x^m for |x| <= 1/2; `even_only` keeps m = 2, 4, ...
double binomial_tail(double p, double x, bool even_only) {
  double coef = p;
  double power = x;
  double sum = 0.0;
  for (int m = 2; m < 400; ++m) {
    coef *= (p - static_cast<double>(m - 1)) / static_cast<double>(m);
    power *= x;
    if (coef == 0.0) break;
    if (even_only && (m % 2) != 0) continue;
    const double term = coef * power;
    sum += term;
    if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

double compensated_dot(std::size_t n, const ConvolutionWeights& w, std::span<const double> f) {
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = w.weight(n, i) * f[i];
    const double t = sum + x;
    carry += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (!(a == b))
    throw Error(ErrorCode::GridMismatch,
                "weights built for n_steps=" + std::to_string(a.n_steps()) +
                    ", path has n_steps=" + std::to_string(b.n_steps()));
}

}  // namespace

ConvolutionWeights::ConvolutionWeights(FracOrder gamma, TimeGrid grid)
    : gamma_(gamma), grid_(grid), scale_(0.0) {
  const double g = gamma.value();
  if (!(g > 0.0))
    throw Error(ErrorCode::InvalidOrder, "convolution weights need a positive order");
  const std::size_t n_steps = grid.n_steps();
  const double p = g + 1.0;
  scale_ = std::pow(grid.step(), g) / gamma_fn(g + 2.0);

  // first[n] = (n-1)^p - (n-1-g) n^g = n^p [(1-h)^p - 1 + p h],  h = 1/n
  first_.assign(n_steps + 1, 0.0);
  if (n_steps >= 1) first_[1] = g;
  for (std::size_t n = 2; n <= n_steps; ++n) {
    const double nn = static_cast<double>(n);
    first_[n] = std::pow(nn, p) * binomial_tail(p, -1.0 / nn, false);
  }

  // interior[k] = (k+1)^p - 2 k^p + (k-1)^p = k^p [(1+h)^p - 2 + (1-h)^p]
  interior_.assign(n_steps + 1, 0.0);
  if (n_steps >= 2) interior_[1] = std::pow(2.0, p) - 2.0;
  for (std::size_t k = 2; k <= n_steps; ++k) {
    const double kk = static_cast<double>(k);
    interior_[k] = std::pow(kk, p) * 2.0 * binomial_tail(p, 1.0 / kk, true);
  }
}

double ConvolutionWeights::weight(std::size_t n, std::size_t i) const noexcept {
  if (n == 0 || i > n) return 0.0;
  if (i == n) return scale_;
  if (i == 0) return scale_ * first_[n];
  return scale_ * interior_[n - i];
}

double ConvolutionWeights::row_sum(std::size_t n) const {
  const std::vector<double> ones(n + 1, 1.0);
  return compensated_dot(n, *this, ones);
}

double ConvolutionWeights::apply_at(std::size_t n, std::span<const double> samples) const {
  return compensated_dot(n, *this, samples);
}

std::vector<double> ConvolutionWeights::apply(std::span<const double> samples) const {
  if (samples.size() != grid_.n_nodes())
    throw Error(ErrorCode::GridMismatch, "sample count does not match the weight grid");
  std::vector<double> out(samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) out[n] = apply_at(n, samples);
  return out;
}

void ConvolutionWeights::accumulate_history(std::size_t n, std::span<const double> samples,
                                            std::size_t dim, std::span<double> out) const {
  if (n == 0) return;
  const double w0 = scale_ * first_[n];
  for (std::size_t k = 0; k < dim; ++k) out[k] += w0 * samples[k];
  for (std::size_t j = 1; j < n; ++j) {
    const double w = scale_ * interior_[n - j];
    const double* row = samples.data() + j * dim;
    for (std::size_t k = 0; k < dim; ++k) out[k] += w * row[k];
  }
}

ConvolutionWeights build_weights(FracOrder gamma, const TimeGrid& grid) {
  return ConvolutionWeights(gamma, grid);
}

SampledPath frac_integral(FracOrder gamma, const SampledPath& path) {
  if (gamma.value() == 0.0) return path;
  return frac_integral(ConvolutionWeights(gamma, path.grid()), path);
}

SampledPath frac_integral(const ConvolutionWeights& weights, const SampledPath& path) {
  require_same_grid(weights.grid(), path.grid());
  SampledPath out(path.grid(), path.dim());
  for (std::size_t k = 0; k < path.dim(); ++k) {
    const std::vector<double> comp = path.component(k);
    out.set_component(k, weights.apply(comp));
  }
  return out;
}

namespace {

// L1 scheme for 0 < gamma < 1 on a single component.
std::vector<double> l1_derivative(double gamma, std::span<const double> u, double tau) {
  const std::size_t n_nodes = u.size();
  const double q = 1.0 - gamma;
  // c[k] = k^q - (k-1)^q
  std::vector<double> c(n_nodes, 0.0);
  if (n_nodes > 1) c[1] = 1.0;
  for (std::size_t k = 2; k < n_nodes; ++k) {
    const double kk = static_cast<double>(k);
    c[k] = -std::pow(kk, q) * std::expm1(q * std::log1p(-1.0 / kk));
  }
  const double scale = std::pow(tau, -gamma) / gamma_fn(2.0 - gamma);
  const double singular = u[0] != 0.0 ? u[0] / gamma_fn(1.0 - gamma) : 0.0;
  std::vector<double> out(n_nodes, 0.0);
  for (std::size_t n = 1; n < n_nodes; ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += (u[j + 1] - u[j]) * c[n - j];
    out[n] = scale * acc;
    if (singular != 0.0) out[n] += singular * std::pow(tau * static_cast<double>(n), -gamma);
  }
  out[0] = n_nodes > 1 ? out[1] : 0.0;
  return out;
}

std::vector<double> first_difference(std::span<const double> u, double tau) {
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t n = 1; n < u.size(); ++n) out[n] = (u[n] - u[n - 1]) / tau;
  out[0] = out[1];
  return out;
}

std::vector<double> second_difference(std::span<const double> g, double tau) {
  const std::size_t last = g.size() - 1;
  const double tau2 = tau * tau;
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t n = 1; n < last; ++n) out[n] = (g[n + 1] - 2.0 * g[n] + g[n - 1]) / tau2;
  // second-order one-sided stencils at both ends
  if (g.size() >= 4) {
    out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / tau2;
    out[last] = (2.0 * g[last] - 5.0 * g[last - 1] + 4.0 * g[last - 2] - g[last - 3]) / tau2;
  } else {
    out[0] = out[last] = (g[2] - 2.0 * g[1] + g[0]) / tau2;
  }
  return out;
}

}  // namespace

SampledPath caputo_derivative(FracOrder gamma_order, const SampledPath& path, double tol_zero) {
  const double gamma = FracOrder::for_derivative(gamma_order.value()).value();
  const double tau = path.grid().step();
  if (gamma > 0.5) {
    const double limit = tol_zero * path.max_abs();
    for (std::size_t k = 0; k < path.dim(); ++k) {
      if (std::fabs(path(0, k)) > limit)
        throw Error(ErrorCode::InitialConditionViolation,
                    "path does not vanish at t=0 (component " + std::to_string(k) +
                        ", value " + std::to_string(path(0, k)) +
                        "); it is not in H_gamma for gamma > 1/2");
    }
  }

  std::optional<ConvolutionWeights> smoothing;
  if (gamma > 1.0 && gamma < 2.0) smoothing.emplace(FracOrder(2.0 - gamma), path.grid());

  SampledPath out(path.grid(), path.dim());
  for (std::size_t k = 0; k < path.dim(); ++k) {
    const std::vector<double> u = path.component(k);
    std::vector<double> d;
    if (gamma < 1.0) {
      d = l1_derivative(gamma, u, tau);
    } else if (gamma == 1.0) {
      d = first_difference(u, tau);
    } else if (gamma == 2.0) {
      d = second_difference(u, tau);
    } else {
      d = second_difference(smoothing->apply(u), tau);
    }
    out.set_component(k, d);
  }
  return out;
}

}  // namespace fracwave::fracops
