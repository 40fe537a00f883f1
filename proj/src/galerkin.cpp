#include "fracwave/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fracwave/error.hpp"
#include "fracwave/parallel.hpp"
#include "fracwave/sobolev.hpp"
#include "fracwave/special.hpp"

namespace fracwave::galerkin {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr std::size_t kLattice = 64;

double lambda_of(std::size_t k) {
  const double kp = static_cast<double>(k) * kPi;
  return kp * kp;
}

double checked(double value, const char* what, double x, double t) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " is not finite at x = " << x << ", t = " << t;
    throw Error(ErrorCode::Evaluation, msg.str());
  }
  return value;
}

void check_limits(std::size_t modes, std::size_t n_steps, const Limits& limits) {
  if (modes < 1) throw Error(ErrorCode::InvalidArgument, "need at least one Galerkin mode");
  if (modes > limits.max_modes)
    throw Error(ErrorCode::ResourceCap, "mode count " + std::to_string(modes) + " exceeds the cap " +
                                            std::to_string(limits.max_modes));
  if (n_steps > limits.max_steps)
    throw Error(ErrorCode::ResourceCap, "n_steps " + std::to_string(n_steps) + " exceeds the cap " +
                                            std::to_string(limits.max_steps));
}

}  // namespace

double Eigenpair::phi(double x) const { return kSqrt2 * sin_pi(static_cast<double>(k) * x); }

double Eigenpair::dphi(double x) const {
  return kSqrt2 * static_cast<double>(k) * kPi * std::cos(kPi * static_cast<double>(k) * x);
}

Eigenpair eigenpair(long long k) {
  if (k < 1) throw Error(ErrorCode::Domain, "eigenpair index must be >= 1, got " + std::to_string(k));
  const auto kk = static_cast<std::size_t>(k);
  return {kk, lambda_of(kk)};
}

CoefficientField CoefficientField::constant(double a, double b, double c) {
  CoefficientField f;
  f.a = [a](double, double) { return a; };
  f.b = [b](double, double) { return b; };
  f.c = [c](double, double) { return c; };
  f.sigma0 = a;
  f.sigma1 = a;
  f.time_dependent = false;
  return f;
}

CoefficientBounds validate(const CoefficientField& coeffs, double t_max) {
  if (!coeffs.a || !coeffs.b || !coeffs.c)
    throw Error(ErrorCode::InvalidArgument, "coefficient field is incomplete");
  if (!(coeffs.sigma0 > 0.0) || !(coeffs.sigma1 >= coeffs.sigma0) || !std::isfinite(coeffs.sigma1))
    throw Error(ErrorCode::Domain, "ellipticity bounds need 0 < sigma0 <= sigma1");
  if (!(t_max > 0.0)) throw Error(ErrorCode::InvalidGrid, "t_max must be positive");

  CoefficientBounds bounds;
  bounds.a_min = std::numeric_limits<double>::infinity();
  bounds.a_max = -std::numeric_limits<double>::infinity();
  const double h = 1e-6 * std::max(1.0, t_max);
  auto dt = [&](const SpaceTimeField& g, const char* name, double x, double t) {
    // One-sided at the ends of [0, T] so the field is never sampled outside it.
    const double lo = std::max(0.0, t - h);
    const double hi = std::min(t_max, t + h);
    return (checked(g(x, hi), name, x, hi) - checked(g(x, lo), name, x, lo)) / (hi - lo);
  };
  for (std::size_t j = 0; j < kLattice; ++j) {
    const double t = t_max * static_cast<double>(j) / (kLattice - 1);
    for (std::size_t i = 0; i < kLattice; ++i) {
      const double x = static_cast<double>(i) / (kLattice - 1);
      const double a = checked(coeffs.a(x, t), "a", x, t);
      if (a < coeffs.sigma0 || a > coeffs.sigma1) {
        std::ostringstream msg;
        msg << "ellipticity violated: a(" << x << ", " << t << ") = " << a << " outside ["
            << coeffs.sigma0 << ", " << coeffs.sigma1 << "]";
        throw Error(ErrorCode::Domain, msg.str());
      }
      bounds.a_min = std::min(bounds.a_min, a);
      bounds.a_max = std::max(bounds.a_max, a);
      bounds.b_max = std::max(bounds.b_max, std::fabs(checked(coeffs.b(x, t), "b", x, t)));
      bounds.c_max = std::max(bounds.c_max, std::fabs(checked(coeffs.c(x, t), "c", x, t)));
      bounds.dt_a_max = std::max(bounds.dt_a_max, std::fabs(dt(coeffs.a, "a_t", x, t)));
      bounds.dt_b_max = std::max(bounds.dt_b_max, std::fabs(dt(coeffs.b, "b_t", x, t)));
      bounds.dt_c_max = std::max(bounds.dt_c_max, std::fabs(dt(coeffs.c, "c_t", x, t)));
    }
  }
  const double dt_max = std::max({bounds.dt_a_max, bounds.dt_b_max, bounds.dt_c_max});
  const double size = std::max({bounds.a_max, bounds.b_max, bounds.c_max, 1.0});
  if (!coeffs.time_dependent && dt_max > 1e-8 * size)
    throw Error(ErrorCode::InvalidArgument, "coefficients declared t-independent vary in t");
  return bounds;
}

QuadratureRule spectral_rule(std::size_t modes) {
  return composite_gauss_legendre(0.0, 1.0, std::max<std::size_t>(32, 4 * modes), 8);
}

ModeTable::ModeTable(std::size_t modes) : modes_(modes), rule_(spectral_rule(modes)) {
  if (modes < 1) throw Error(ErrorCode::InvalidArgument, "need at least one Galerkin mode");
  const auto points = static_cast<Eigen::Index>(rule_.size());
  const auto n = static_cast<Eigen::Index>(modes);
  phi_.resize(points, n);
  dphi_.resize(points, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigenpair e = eigenpair(k + 1);
    for (Eigen::Index q = 0; q < points; ++q) {
      const double x = rule_.nodes[static_cast<std::size_t>(q)];
      phi_(q, k) = e.phi(x);
      dphi_(q, k) = e.dphi(x);
    }
  }
}

Vector ModeTable::project(const SpaceField& f) const {
  const auto points = static_cast<Eigen::Index>(rule_.size());
  Vector weighted(points);
  for (Eigen::Index q = 0; q < points; ++q) {
    const double x = rule_.nodes[static_cast<std::size_t>(q)];
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "field is not finite at x = " << x;
      throw Error(ErrorCode::Evaluation, msg.str());
    }
    weighted[q] = rule_.weights[static_cast<std::size_t>(q)] * v;
  }
  return phi_.transpose() * weighted;
}

Vector project(const SpaceField& f, std::size_t modes) { return ModeTable(modes).project(f); }

Matrix assemble_Q(double t, const CoefficientField& coeffs, const ModeTable& table) {
  const QuadratureRule& rule = table.rule();
  const auto points = static_cast<Eigen::Index>(rule.size());
  Vector wa(points), wb(points), wc(points);
  for (Eigen::Index q = 0; q < points; ++q) {
    const auto qi = static_cast<std::size_t>(q);
    const double x = rule.nodes[qi];
    const double w = rule.weights[qi];
    wa[q] = w * checked(coeffs.a(x, t), "a", x, t);
    wb[q] = w * checked(coeffs.b(x, t), "b", x, t);
    wc[q] = w * checked(coeffs.c(x, t), "c", x, t);
  }
  const Matrix& phi = table.phi();
  const Matrix& dphi = table.dphi();
  Matrix q = -(dphi.transpose() * wa.asDiagonal() * dphi);
  q.noalias() -= phi.transpose() * wb.asDiagonal() * dphi;
  q.noalias() -= phi.transpose() * wc.asDiagonal() * phi;
  return q;
}

Matrix assemble_Q(double t, const CoefficientField& coeffs, std::size_t modes) {
  return assemble_Q(t, coeffs, ModeTable(modes));
}

SpectralProblem SpectralProblem::build(double alpha, const TimeGrid& grid, std::size_t modes,
                                       CoefficientField coeffs, const SpaceField& a0,
                                       const SpaceField& a1, const SpaceTimeField& forcing,
                                       const Limits& limits, std::size_t threads) {
  check_limits(modes, grid.n_steps(), limits);
  validate(coeffs, grid.t_max());
  const ModeTable table(modes);

  SpectralProblem p;
  p.alpha = alpha;
  p.modes = modes;
  p.grid = grid;
  p.coeffs = std::move(coeffs);
  p.a0 = table.project(a0);
  p.a1 = table.project(a1);
  p.f = SampledPath(grid, modes);
  parallel_for(grid.n_nodes(), threads, [&](std::size_t i) {
    const double t = grid.node(i);
    const Vector fi = table.project([&](double x) { return forcing(x, t); });
    for (std::size_t k = 0; k < modes; ++k) p.f(i, k) = fi[static_cast<Eigen::Index>(k)];
  });

  // ||a0'||^2 by a fourth-order central difference at the quadrature nodes.
  const QuadratureRule& rule = table.rule();
  const double h = 1e-4;
  double grad2 = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = rule.nodes[q];
    const double d = (a0(x - 2 * h) - 8 * a0(x - h) + 8 * a0(x + h) - a0(x + 2 * h)) / (12 * h);
    grad2 += rule.weights[q] * d * d;
  }
  double captured = 0.0;
  for (std::size_t k = 0; k < modes; ++k) {
    const double c = p.a0[static_cast<Eigen::Index>(k)];
    captured += lambda_of(k + 1) * c * c;
  }
  p.a0_h1_truncation = std::sqrt(std::max(0.0, grad2 - captured));
  return p;
}

std::vector<double> SpectralProblem::eigenvalues() const {
  std::vector<double> out(modes);
  for (std::size_t k = 0; k < modes; ++k) out[k] = lambda_of(k + 1);
  return out;
}

fracode::FodeProblem to_fode(const SpectralProblem& problem, const Limits& limits,
                             std::size_t threads) {
  check_limits(problem.modes, problem.grid.n_steps(), limits);
  if (problem.f.dim() != problem.modes || !(problem.f.grid() == problem.grid) ||
      static_cast<std::size_t>(problem.a0.size()) != problem.modes ||
      static_cast<std::size_t>(problem.a1.size()) != problem.modes)
    throw Error(ErrorCode::InvalidArgument, "spectral problem data disagree on N or the grid");
  const ModeTable table(problem.modes);
  const TimeGrid& grid = problem.grid;
  if (!problem.coeffs.time_dependent)
    return fracode::FodeProblem(problem.alpha, problem.a0, problem.a1,
                                fracode::MatrixField::constant(assemble_Q(0.0, problem.coeffs, table)),
                                problem.f);
  std::vector<Matrix> q(grid.n_nodes());
  parallel_for(grid.n_nodes(), threads,
               [&](std::size_t i) { q[i] = assemble_Q(grid.node(i), problem.coeffs, table); });
  return fracode::FodeProblem(problem.alpha, problem.a0, problem.a1,
                              fracode::MatrixField::table(std::move(q)), problem.f);
}

FieldLattice reconstruct(const SampledPath& p, const std::vector<double>& x_nodes,
                         std::size_t t_stride) {
  if (t_stride < 1) throw Error(ErrorCode::InvalidArgument, "t_stride must be >= 1");
  for (double x : x_nodes)
    if (!(x >= 0.0 && x <= 1.0))
      throw Error(ErrorCode::Domain, "reconstruction node outside [0, 1]: " + std::to_string(x));
  const std::size_t modes = p.dim();
  const TimeGrid& grid = p.grid();

  FieldLattice out;
  out.x = x_nodes;
  for (std::size_t i = 0; i < grid.n_nodes(); i += t_stride) out.time_nodes.push_back(i);
  if (out.time_nodes.back() != grid.n_steps()) out.time_nodes.push_back(grid.n_steps());
  for (std::size_t i : out.time_nodes) out.t.push_back(grid.node(i));

  std::vector<double> basis(x_nodes.size() * modes);
  for (std::size_t j = 0; j < x_nodes.size(); ++j)
    for (std::size_t k = 0; k < modes; ++k) basis[j * modes + k] = Eigenpair{k + 1, 0.0}.phi(x_nodes[j]);

  out.values.assign(out.time_nodes.size() * x_nodes.size(), 0.0);
  for (std::size_t ti = 0; ti < out.time_nodes.size(); ++ti) {
    const auto row = p.row(out.time_nodes[ti]);
    for (std::size_t j = 0; j < x_nodes.size(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < modes; ++k) sum += row[k] * basis[j * modes + k];
      out.values[ti * x_nodes.size() + j] = sum;
    }
  }
  return out;
}

NormReport spectral_norms(const fracode::FodeSolution& p) {
  const TimeGrid& grid = p.u.grid();
  const std::size_t modes = p.u.dim();
  NormReport r;
  SampledPath weighted(grid, modes);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    double h1 = 0.0, h2 = 0.0, cap = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
      const double lam = lambda_of(k + 1);
      const double u = p.u(i, k);
      h1 += lam * u * u;
      h2 += lam * lam * u * u;
      cap += p.caputo(i, k) * p.caputo(i, k);
      weighted(i, k) = p.caputo(i, k) / std::sqrt(lam);
    }
    r.linf_h10 = std::max(r.linf_h10, std::sqrt(h1));
    r.linf_h2 = std::max(r.linf_h2, std::sqrt(h2));
    r.caputo_linf_l2 = std::max(r.caputo_linf_l2, std::sqrt(cap));
  }
  r.dt_l2_l2 = fracops::l2_norm(fracops::finite_difference_derivative(p.u));
  r.caputo_l2_hminus1 = fracops::l2_norm(weighted);
  return r;
}

SolutionBundle solve_ibvp(const SpectralProblem& problem, const OutputLattice& lattice,
                          const Limits& limits, std::size_t threads) {
  if (lattice.x_nodes < 2) throw Error(ErrorCode::InvalidArgument, "output lattice needs >= 2 x nodes");
  SolutionBundle out{fracode::solve_fode(to_fode(problem, limits, threads)), {}, {}};
  std::vector<double> x(lattice.x_nodes);
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = static_cast<double>(j) / static_cast<double>(x.size() - 1);
  out.field = reconstruct(out.p.u, x, lattice.t_stride);
  out.norms = spectral_norms(out.p);
  return out;
}

}  // namespace fracwave::galerkin
