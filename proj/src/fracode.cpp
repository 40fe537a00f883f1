#include "fracwave/fracode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "fracwave/error.hpp"
#include "fracwave/fracops.hpp"
#include "fracwave/sobolev.hpp"
#include "fracwave/special.hpp"

namespace fracwave::fracode {
namespace {

void require_square(const Matrix& m, std::size_t dim) {
  if (m.rows() != m.cols() || (dim != 0 && static_cast<std::size_t>(m.rows()) != dim))
    throw Error(ErrorCode::InvalidArgument, "coefficient matrix has the wrong shape");
  if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "coefficient matrix is not finite");
}

double row_sum_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

MatrixField MatrixField::constant(Matrix p) {
  require_square(p, 0);
  std::vector<Matrix> samples;
  samples.push_back(std::move(p));
  return MatrixField(std::move(samples));
}

MatrixField MatrixField::table(std::vector<Matrix> samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "empty coefficient table");
  const auto dim = static_cast<std::size_t>(samples.front().rows());
  for (const auto& m : samples) require_square(m, dim);
  return MatrixField(std::move(samples));
}

MatrixField MatrixField::evaluator(const TimeGrid& grid, const std::function<Matrix(double)>& p) {
  std::vector<Matrix> samples;
  samples.reserve(grid.n_nodes());
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) samples.push_back(p(grid.node(i)));
  return table(std::move(samples));
}

FodeProblem::FodeProblem(double alpha, Vector a0, Vector a1, MatrixField p, SampledPath forcing)
    : alpha_(alpha),
      a0_(std::move(a0)),
      a1_(std::move(a1)),
      p_(std::move(p)),
      forcing_(std::move(forcing)) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw Error(ErrorCode::InvalidOrder,
                "fractional ODE order must lie in (1, 2], got " + std::to_string(alpha));
  const std::size_t n = a0_.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "system dimension must be >= 1");
  if (static_cast<std::size_t>(a1_.size()) != n || p_.dim() != n || forcing_.dim() != n)
    throw Error(ErrorCode::InvalidArgument, "initial data, P and F disagree on the dimension");
  if (!p_.is_constant() && p_.sample_count() != grid().n_nodes())
    throw Error(ErrorCode::GridMismatch, "coefficient table length does not match the grid");
  if (!a0_.allFinite() || !a1_.allFinite())
    throw Error(ErrorCode::InvalidArgument, "initial data are not finite");
  for (std::size_t i = 0; i < p_.sample_count(); ++i)
    p_norm_inf_ = std::max(p_norm_inf_, row_sum_norm(p_.at(i)));
}

FodeProblem FodeProblem::from_functions(double alpha, Vector a0, Vector a1, const TimeGrid& grid,
                                        const std::function<Matrix(double)>& p,
                                        const std::function<Vector(double)>& forcing) {
  const auto dim = static_cast<std::size_t>(a0.size());
  SampledPath f(grid, dim);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    const Vector fi = forcing(grid.node(i));
    if (static_cast<std::size_t>(fi.size()) != dim)
      throw Error(ErrorCode::InvalidArgument, "forcing has the wrong dimension");
    for (std::size_t k = 0; k < dim; ++k) f(i, k) = fi[static_cast<Eigen::Index>(k)];
  }
  f.require_finite();
  return FodeProblem(alpha, std::move(a0), std::move(a1), MatrixField::evaluator(grid, p),
                     std::move(f));
}

Vector FodeProblem::shifted_forcing(std::size_t node) const {
  const std::size_t n = dim();
  Vector out(n);
  for (std::size_t k = 0; k < n; ++k) out[static_cast<Eigen::Index>(k)] = forcing_(node, k);
  const Matrix& p = p_.at(node);
  out += p * a0_ + grid().node(node) * (p * a1_);
  return out;
}

std::size_t required_steps(double alpha, double t_max, double p_norm_inf) {
  if (p_norm_inf <= 0.0) return 2;
  const double tau_max = std::pow(0.5 * gamma_fn(alpha + 2.0) / p_norm_inf, 1.0 / alpha);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(t_max / tau_max)) + 1);
}

FodeSolution solve_fode(const FodeProblem& problem) {
  const TimeGrid& grid = problem.grid();
  const std::size_t dim = problem.dim();
  const std::size_t n_nodes = grid.n_nodes();
  const fracops::ConvolutionWeights weights(FracOrder(problem.alpha()), grid);
  const double w_end = weights.endpoint();

  for (std::size_t i = 1; i < n_nodes; ++i) {
    if (w_end * row_sum_norm(problem.p().at(i)) >= 0.5) {
      const std::size_t need = required_steps(problem.alpha(), grid.t_max(), problem.p_norm_inf());
      std::ostringstream msg;
      msg << "time step too coarse: w_nn*||P|| = " << w_end * row_sum_norm(problem.p().at(i))
          << " >= 1/2 at node " << i << "; use n_steps >= " << need;
      throw RefineGridError(msg.str(), need);
    }
    if (problem.p().is_constant()) break;
  }

  // g_i = P_i v_i + F~_i, stored node-major for the history sums.
  std::vector<double> g(n_nodes * dim, 0.0);
  std::vector<double> v(n_nodes * dim, 0.0);
  std::vector<Vector> shifted(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) shifted[i] = problem.shifted_forcing(i);
  for (std::size_t k = 0; k < dim; ++k) g[k] = shifted[0][static_cast<Eigen::Index>(k)];

  const Matrix identity = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::optional<Eigen::PartialPivLU<Matrix>> cached;
  if (problem.p().is_constant()) cached.emplace(identity - w_end * problem.p().at(0));

  std::vector<double> history(dim);
  for (std::size_t n = 1; n < n_nodes; ++n) {
    std::fill(history.begin(), history.end(), 0.0);
    weights.accumulate_history(n, g, dim, history);
    Vector rhs = Eigen::Map<const Vector>(history.data(), static_cast<Eigen::Index>(dim)) +
                 w_end * shifted[n];

    Vector vn;
    double rcond = 1.0;
    if (cached) {
      vn = cached->solve(rhs);
      if (n == 1) rcond = cached->rcond();
    } else {
      const Eigen::PartialPivLU<Matrix> lu(identity - w_end * problem.p().at(n));
      rcond = lu.rcond();
      vn = lu.solve(rhs);
    }
    if (!(rcond > 1e-14) || !vn.allFinite())
      throw Error(ErrorCode::NumericalSingularity,
                  "singular step matrix at node " + std::to_string(n));

    const Vector gn = problem.p().at(n) * vn + shifted[n];
    for (std::size_t k = 0; k < dim; ++k) {
      v[n * dim + k] = vn[static_cast<Eigen::Index>(k)];
      g[n * dim + k] = gn[static_cast<Eigen::Index>(k)];
    }
  }

  // Re-substitute into the discrete Volterra equation.
  double residual = 0.0;
  for (std::size_t n = 1; n < n_nodes; ++n) {
    std::fill(history.begin(), history.end(), 0.0);
    weights.accumulate_history(n, g, dim, history);
    for (std::size_t k = 0; k < dim; ++k) {
      const double rhs = history[k] + w_end * g[n * dim + k];
      residual = std::max(residual, std::fabs(v[n * dim + k] - rhs));
    }
  }

  SampledPath vpath(grid, dim, std::move(v));
  SampledPath u(grid, dim);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double t = grid.node(i);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      u(i, k) = vpath(i, k) + problem.a0()[kk] + t * problem.a1()[kk];
    }
  }
  u.require_finite();
  SampledPath caputo(grid, dim, std::move(g));

  FodeSolution out{std::move(u), std::move(vpath), std::move(caputo), residual, {}};
  out.norms.caputo_l2 = fracops::l2_norm(out.caputo);
  out.norms.u_l2 = fracops::l2_norm(out.u);
  return out;
}

EstimateWitness estimate_witness(const FodeProblem& problem, const FodeSolution& solution,
                                 double tol) {
  EstimateWitness w;
  w.lhs = solution.norms.caputo_l2 +
          fracops::sobolev_slobodecki_norm(problem.alpha(), solution.u, fracops::NormFlavor::Plain);
  w.rhs = problem.a0().norm() + problem.a1().norm() + fracops::l2_norm(problem.forcing());
  if (w.rhs == 0.0) {
    w.ratio = 0.0;
    w.violation = w.lhs > tol;
  } else {
    w.ratio = w.lhs / w.rhs;
  }
  return w;
}

const char* to_string(ConvergenceStatus status) {
  switch (status) {
    case ConvergenceStatus::Converged: return "converged";
    case ConvergenceStatus::Exact: return "exact";
    case ConvergenceStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

RegularityReport regularity_probe(const std::function<FodeProblem(const TimeGrid&)>& build,
                                  const TimeGrid& base, std::size_t levels,
                                  bool enforce_compatibility) {
  if (levels < 3)
    throw Error(ErrorCode::InvalidArgument, "a Richardson triplet needs at least 3 levels");
  RegularityReport report;

  TimeGrid grid = base;
  for (std::size_t level = 0; level < levels; ++level) {
    const FodeProblem problem = build(grid);
    if (level == 0) {
      // H_1 compatibility of F + P a0 at t = 0.
      Vector start(static_cast<Eigen::Index>(problem.dim()));
      for (std::size_t k = 0; k < problem.dim(); ++k)
        start[static_cast<Eigen::Index>(k)] = problem.forcing()(0, k);
      const Vector pa0 = problem.p().at(0) * problem.a0();
      const double scale = std::max(problem.forcing().max_abs(), pa0.cwiseAbs().maxCoeff());
      const double defect = (start + pa0).cwiseAbs().maxCoeff();
      report.compatible = defect <= fracops::kTolZero * scale;
      if (!report.compatible && enforce_compatibility) {
        std::ostringstream msg;
        msg << "F(0) + P(0) a0 = " << defect << " != 0: F + P a0 is not in H_1";
        throw Error(ErrorCode::Compatibility, msg.str());
      }
    }
    const FodeSolution solution = solve_fode(problem);
    report.steps.push_back(grid.n_steps());
    report.u_final.emplace_back(Eigen::Map<const Vector>(
        solution.u.row(grid.n_steps()).data(), static_cast<Eigen::Index>(problem.dim())));
    grid = grid.refined();
  }

  double scale = 0.0;
  for (const auto& u : report.u_final) scale = std::max(scale, u.cwiseAbs().maxCoeff());
  for (std::size_t i = 1; i < levels; ++i)
    report.differences.push_back((report.u_final[i] - report.u_final[i - 1]).cwiseAbs().maxCoeff());

  const double exact_tol = 1e-13 * (1.0 + scale);
  if (std::all_of(report.differences.begin(), report.differences.end(),
                  [&](double d) { return d <= exact_tol; })) {
    report.status = ConvergenceStatus::Exact;
    report.min_order = std::numeric_limits<double>::infinity();
    report.expected_met = report.compatible;
    return report;
  }
  bool monotone = true;
  report.min_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < report.differences.size(); ++i) {
    const double prev = report.differences[i - 1];
    const double next = report.differences[i];
    if (!(next < prev) || next <= 0.0) monotone = false;
    const double order = next > 0.0 ? std::log2(prev / next) : std::numeric_limits<double>::infinity();
    report.orders.push_back(order);
    report.min_order = std::min(report.min_order, order);
  }
  report.status = monotone ? ConvergenceStatus::Converged : ConvergenceStatus::Inconclusive;
  report.expected_met = report.compatible && monotone && report.min_order >= 1.8;
  return report;
}

}  // namespace fracwave::fracode
