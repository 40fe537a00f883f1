#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fracwave/fracode.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/quadrature.hpp"

namespace fracwave::galerkin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SpaceField = std::function<double(double x)>;
using SpaceTimeField = std::function<double(double x, double t)>;

/// Dirichlet eigenpair of -d^2/dx^2 on (0, 1): lambda = (k pi)^2, phi = sqrt(2) sin(k pi x).
struct Eigenpair {
  std::size_t k;
  double lambda;
  double phi(double x) const;
  double dphi(double x) const;
};

Eigenpair eigenpair(long long k);

/// Coefficients of A(t)u = -(a u_x)_x + b u_x + c u.
struct CoefficientField {
  SpaceTimeField a;
  SpaceTimeField b;
  SpaceTimeField c;
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  /// false when a, b and c do not depend on t; Q is then assembled once.
  bool time_dependent = true;

  static CoefficientField constant(double a, double b, double c);
};

/// Lattice diagnostics gathered by validate().
struct CoefficientBounds {
  double a_min = 0.0;
  double a_max = 0.0;
  double b_max = 0.0;
  double c_max = 0.0;
  double dt_a_max = 0.0;  ///< max |a_t| by central differences
  double dt_b_max = 0.0;
  double dt_c_max = 0.0;
};

/// Checks sigma0 <= a <= sigma1 and boundedness of a, b, c and their t-derivatives
/// on a 64x64 (x, t) lattice over [0, 1] x [0, t_max].
CoefficientBounds validate(const CoefficientField& coeffs, double t_max);

/// Composite Gauss-Legendre rule on [0, 1] with max(32, 4N) panels of order 8.
QuadratureRule spectral_rule(std::size_t modes);

/// (f, phi_k) for k = 1..N.
Vector project(const SpaceField& f, std::size_t modes);

/// Mode tables at the quadrature nodes, reused across assemblies.
class ModeTable {
 public:
  explicit ModeTable(std::size_t modes);

  std::size_t modes() const noexcept { return modes_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const Matrix& phi() const noexcept { return phi_; }    ///< points x N
  const Matrix& dphi() const noexcept { return dphi_; }  ///< points x N

  Vector project(const SpaceField& f) const;

 private:
  std::size_t modes_;
  QuadratureRule rule_;
  Matrix phi_;
  Matrix dphi_;
};

/// q_lk(t) = -int a phi_k' phi_l' - int (b phi_k' + c phi_k) phi_l.
Matrix assemble_Q(double t, const CoefficientField& coeffs, std::size_t modes);
Matrix assemble_Q(double t, const CoefficientField& coeffs, const ModeTable& table);

struct Limits {
  std::size_t max_modes = 256;
  std::size_t max_steps = 65536;
};

/// Problem data of the Galerkin system d^alpha (p - a0 - t a1) = Q(t) p + f(t).
struct SpectralProblem {
  double alpha = 2.0;
  std::size_t modes = 1;
  TimeGrid grid{1.0, 2};
  CoefficientField coeffs;
  Vector a0;
  Vector a1;
  SampledPath f{TimeGrid(1.0, 2), 1};
  /// ||a0 - P_N a0||_{H^1_0}, computed from ||a0'||^2 - sum lambda_k a0_k^2.
  double a0_h1_truncation = 0.0;

  /// Projects a0, a1 and F(., t_i) onto the first `modes` eigenfunctions.
  static SpectralProblem build(double alpha, const TimeGrid& grid, std::size_t modes,
                               CoefficientField coeffs, const SpaceField& a0,
                               const SpaceField& a1, const SpaceTimeField& forcing,
                               const Limits& limits = {}, std::size_t threads = 1);

  std::vector<double> eigenvalues() const;
};

struct OutputLattice {
  std::size_t x_nodes = 65;  ///< uniform x nodes on [0, 1], endpoints included
  std::size_t t_stride = 1;  ///< every t_stride-th time node, plus the last
};

/// u_N sampled on x_nodes at the selected time nodes; values are time-major.
struct FieldLattice {
  std::vector<double> x;
  std::vector<std::size_t> time_nodes;
  std::vector<double> t;
  std::vector<double> values;

  double at(std::size_t ti, std::size_t xi) const { return values[ti * x.size() + xi]; }
};

struct NormReport {
  double linf_h10 = 0.0;         ///< max_t sqrt(sum lambda_k p_k^2)
  double dt_l2_l2 = 0.0;         ///< ||d_t u_N||_{L2(0,T;L2)}
  double linf_h2 = 0.0;          ///< max_t sqrt(sum lambda_k^2 p_k^2)
  double caputo_linf_l2 = 0.0;   ///< max_t ||d^alpha (u_N - a0 - t a1)||_{L2}
  double caputo_l2_hminus1 = 0.0;  ///< ||d^alpha (u_N - a0 - t a1)||_{L2(0,T;H^-1)}
};

struct SolutionBundle {
  fracode::FodeSolution p;
  FieldLattice field;
  NormReport norms;
};

/// Assembles Q at every node (once if the coefficients are t-independent),
/// solves the fractional ODE system and reconstructs the field.
SolutionBundle solve_ibvp(const SpectralProblem& problem, const OutputLattice& lattice = {},
                          const Limits& limits = {}, std::size_t threads = 1);

/// Builds the fractional ODE problem of the Galerkin system.
fracode::FodeProblem to_fode(const SpectralProblem& problem, const Limits& limits = {},
                             std::size_t threads = 1);

/// sum_k p_k(t_i) phi_k(x_j) at the selected nodes; exact zeros at x = 0 and 1.
FieldLattice reconstruct(const SampledPath& p, const std::vector<double>& x_nodes,
                         std::size_t t_stride = 1);

NormReport spectral_norms(const fracode::FodeSolution& p);

}  // namespace fracwave::galerkin
