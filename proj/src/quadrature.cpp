#include "fracwave/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "fracwave/error.hpp"

namespace fracwave {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const auto kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  if (n == 1) p0 = 1.0;
  return {p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 2.0);
  if (order == 1) return rule;
  const auto n = static_cast<double>(order);
  for (std::size_t i = 0; i < order / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) {
    const double dp = legendre(order, 0.0).second;
    rule.weights[order / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels,
                                        std::size_t order) {
  if (panels < 1 || !(hi > lo))
    throw Error(ErrorCode::InvalidArgument, "composite rule needs panels >= 1 and lo < hi");
  const QuadratureRule base = gauss_legendre(order);
  const double h = (hi - lo) / static_cast<double>(panels);
  QuadratureRule rule;
  rule.nodes.reserve(panels * order);
  rule.weights.reserve(panels * order);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t j = 0; j < order; ++j) {
      rule.nodes.push_back(mid + 0.5 * h * base.nodes[j]);
      rule.weights.push_back(0.5 * h * base.weights[j]);
    }
  }
  return rule;
}

}  // namespace fracwave
