#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fracwave/grid.hpp"

namespace fracwave::fracode {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Coefficient matrix P(t) of the system, held as one matrix per grid node
/// (or a single matrix when P does not depend on t).
class MatrixField {
 public:
  static MatrixField constant(Matrix p);
  /// One matrix per grid node.
  static MatrixField table(std::vector<Matrix> samples);
  /// Sampled once per node of `grid`.
  static MatrixField evaluator(const TimeGrid& grid, const std::function<Matrix(double)>& p);

  bool is_constant() const noexcept { return samples_.size() == 1; }
  std::size_t dim() const noexcept { return samples_.front().rows(); }
  std::size_t sample_count() const noexcept { return samples_.size(); }
  const Matrix& at(std::size_t node) const noexcept {
    return samples_[is_constant() ? 0 : node];
  }

 private:
  explicit MatrixField(std::vector<Matrix> samples) : samples_(std::move(samples)) {}
  std::vector<Matrix> samples_;
};

/// Initial value problem  d^alpha (u - a0 - t a1) = P(t) u + F(t),  1 < alpha <= 2.
class FodeProblem {
 public:
  FodeProblem(double alpha, Vector a0, Vector a1, MatrixField p, SampledPath forcing);

  /// Convenience for programmatic use: P and F given as functions of t.
  static FodeProblem from_functions(double alpha, Vector a0, Vector a1, const TimeGrid& grid,
                                    const std::function<Matrix(double)>& p,
                                    const std::function<Vector(double)>& forcing);

  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return a0_.size(); }
  const TimeGrid& grid() const noexcept { return forcing_.grid(); }
  const Vector& a0() const noexcept { return a0_; }
  const Vector& a1() const noexcept { return a1_; }
  const MatrixField& p() const noexcept { return p_; }
  const SampledPath& forcing() const noexcept { return forcing_; }
  /// max over nodes of the max-row-sum norm of P.
  double p_norm_inf() const noexcept { return p_norm_inf_; }

  /// F~(t_i) = F(t_i) + P(t_i) a0 + t_i P(t_i) a1.
  Vector shifted_forcing(std::size_t node) const;

 private:
  double alpha_;
  Vector a0_;
  Vector a1_;
  MatrixField p_;
  SampledPath forcing_;
  double p_norm_inf_ = 0.0;
};

struct FodeNorms {
  double caputo_l2 = 0.0;  ///< ||d^alpha v||_{L2}, proxy for ||v||_{H_alpha}
  double u_l2 = 0.0;
};

struct FodeSolution {
  SampledPath u;
  SampledPath v;       ///< u - a0 - t a1
  SampledPath caputo;  ///< d^alpha v = P v + F~ at the nodes
  double residual = 0.0;
  FodeNorms norms;
};

/// Largest step count violating w_nn * ||P||_inf < 1/2, plus one.
std::size_t required_steps(double alpha, double t_max, double p_norm_inf);

/// Implicit product-integration march for v = J^alpha(P v + F~):
///   (I - w_nn P_n) v_n = sum_{i<n} w_{n,i} (P_i v_i + F~_i) + w_nn F~_n,   v_0 = 0.
/// Throws RefineGridError when the step is too coarse for the solvability
/// bound and NumericalSingularity if a step matrix is nevertheless singular.
FodeSolution solve_fode(const FodeProblem& problem);

struct EstimateWitness {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool violation = false;  ///< rhs == 0 but lhs is not
};

/// lhs = ||d^alpha v||_{L2} + ||u||_{H^alpha},  rhs = |a0| + |a1| + ||F||_{L2}.
EstimateWitness estimate_witness(const FodeProblem& problem, const FodeSolution& solution,
                                 double tol = 1e-12);

enum class ConvergenceStatus {
  Converged,     ///< monotone differences, orders reported
  Exact,         ///< all levels agree to rounding
  Inconclusive,  ///< differences not monotone
};

const char* to_string(ConvergenceStatus status);

struct RegularityReport {
  std::vector<std::size_t> steps;
  std::vector<Vector> u_final;      ///< u(T) per level
  std::vector<double> differences;  ///< max |u_{2n}(T) - u_n(T)|
  std::vector<double> orders;       ///< log2 ratios of consecutive differences
  ConvergenceStatus status = ConvergenceStatus::Inconclusive;
  double min_order = 0.0;
  bool compatible = true;   ///< F(0) + P(0) a0 = 0 held
  bool expected_met = false;  ///< compatible and order >= 1.8 (or exact)
};

/// Builds the problem on successive grids n, 2n, ..., 2^{levels-1} n and
/// estimates the order of u(T) from Richardson triplets. Requires the
/// compatibility F(0) + P(0) a0 = 0 unless `enforce_compatibility` is false,
/// in which case an incompatible problem is run and reported as such.
RegularityReport regularity_probe(const std::function<FodeProblem(const TimeGrid&)>& build,
                                  const TimeGrid& base, std::size_t levels = 4,
                                  bool enforce_compatibility = true);

}  // namespace fracwave::fracode
