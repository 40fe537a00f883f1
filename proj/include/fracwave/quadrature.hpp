#pragma once

#include <cstddef>
#include <vector>

namespace fracwave {

/// Nodes and weights of a quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre rule of the given order on [-1, 1] (Newton on P_n).
QuadratureRule gauss_legendre(std::size_t order);

/// Composite Gauss-Legendre on [lo, hi] with equal panels.
QuadratureRule composite_gauss_legendre(double lo, double hi, std::size_t panels,
                                        std::size_t order = 8);

}  // namespace fracwave
