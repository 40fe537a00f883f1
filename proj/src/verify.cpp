#include "fracwave/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracwave/error.hpp"
#include "fracwave/fracops.hpp"
#include "fracwave/parallel.hpp"
#include "fracwave/random.hpp"
#include "fracwave/sobolev.hpp"
#include "fracwave/special.hpp"

namespace fracwave::verify {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_order_le_one(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw Error(ErrorCode::InvalidOrder, "inequality check needs 0 < gamma <= 1, got " + std::to_string(gamma));
}

void require_zero_start(const SampledPath& path, const char* what) {
  const double limit = fracops::kTolZero * path.max_abs();
  for (double v : path.row(0))
    if (std::fabs(v) > limit)
      throw Error(ErrorCode::TraceViolation, std::string(what) + " must vanish at t = 0");
}

void finish(InequalityWitness& w) {
  w.margin = kInf;
  for (std::size_t i = 0; i < w.lhs.size(); ++i) w.margin = std::min(w.margin, w.lhs[i] - w.rhs[i]);
  w.passed = w.margin >= -w.tolerance;
  w.verdict = w.passed ? Verdict::Pass : Verdict::Fail;
}

double lambda_of(std::size_t k) {
  const double kp = static_cast<double>(k) * kPi;
  return kp * kp;
}

// sum_k weight(k) p_k^2 per node.
template <class Weight>
SampledPath weighted_energy(const SampledPath& p, Weight weight) {
  SampledPath out(p.grid(), 1);
  for (std::size_t i = 0; i < p.n_nodes(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.dim(); ++k) s += weight(k) * p(i, k) * p(i, k);
    out(i) = s;
  }
  return out;
}

SampledPath scaled_components(const SampledPath& p, const std::vector<double>& factor) {
  SampledPath out(p.grid(), p.dim());
  for (std::size_t i = 0; i < p.n_nodes(); ++i)
    for (std::size_t k = 0; k < p.dim(); ++k) out(i, k) = factor[k] * p(i, k);
  return out;
}

double weighted_norm(const galerkin::Vector& c, double power) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    s += std::pow(lambda_of(static_cast<std::size_t>(k) + 1), power) * c[k] * c[k];
  return std::sqrt(s);
}

std::vector<double> lambda_powers(std::size_t modes, double power) {
  std::vector<double> out(modes);
  for (std::size_t k = 0; k < modes; ++k) out[k] = std::pow(lambda_of(k + 1), power);
  return out;
}

void set_ratio(EstimateEntry& e) {
  e.lhs = 0.0;
  e.rhs = 0.0;
  for (const auto& [name, v] : e.lhs_terms) e.lhs += v;
  for (const auto& [name, v] : e.rhs_terms) e.rhs += v;
  if (e.rhs > 0.0) {
    e.ratio = e.lhs / e.rhs;
  } else {
    e.ratio = 0.0;
    if (e.lhs > 1e-12) {
      e.verdict = Verdict::Fail;
      e.note = "nonzero solution for zero data";
    }
  }
  if (!std::isfinite(e.ratio)) e.verdict = Verdict::Fail;
}

MatrixCoercivityLevel coercivity_level(double gamma, const galerkin::CoefficientField& coeffs,
                                       const SampledPath& p, double tol_ineq) {
  require_zero_start(p, "gradient data");
  const TimeGrid& grid = p.grid();
  const std::size_t modes = p.dim();
  const galerkin::ModeTable table(modes);
  const auto& rule = table.rule();
  const auto points = static_cast<Eigen::Index>(rule.size());
  auto stiffness = [&](double t) {
    galerkin::Vector wa(points);
    for (Eigen::Index q = 0; q < points; ++q) {
      const auto qi = static_cast<std::size_t>(q);
      wa[q] = rule.weights[qi] * coeffs.a(rule.nodes[qi], t);
    }
    return galerkin::Matrix(table.dphi().transpose() * wa.asDiagonal() * table.dphi());
  };

  const SampledPath dp = fracops::caputo_derivative(FracOrder(gamma), p);
  SampledPath pairing(grid, 1);
  galerkin::Matrix s = stiffness(0.0);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    if (coeffs.time_dependent && i > 0) s = stiffness(grid.node(i));
    const auto pi = Eigen::Map<const galerkin::Vector>(p.row(i).data(), static_cast<Eigen::Index>(modes));
    const auto di = Eigen::Map<const galerkin::Vector>(dp.row(i).data(), static_cast<Eigen::Index>(modes));
    pairing(i) = pi.dot(s * di);
  }
  const SampledPath lhs = fracops::frac_integral(FracOrder(gamma), pairing);
  const SampledPath energy = weighted_energy(p, [](std::size_t k) { return lambda_of(k + 1); });

  MatrixCoercivityLevel level;
  level.n_steps = grid.n_steps();
  level.t = grid.nodes();
  level.lhs = lhs.values();
  level.energy.resize(grid.n_nodes());
  level.integral.assign(grid.n_nodes(), 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    level.energy[i] = 0.5 * coeffs.sigma0 * energy(i);
    scale = std::max(scale, energy(i));
    if (i > 0) level.integral[i] = level.integral[i - 1] + 0.5 * grid.step() * (energy(i - 1) + energy(i));
  }
  const double tol = tol_ineq * (1.0 + scale);
  level.fitted_c = 0.0;
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    const double excess = level.energy[i] - level.lhs[i] - tol;
    if (excess <= 0.0) continue;
    level.fitted_c = level.integral[i] > 0.0 ? std::max(level.fitted_c, excess / level.integral[i]) : kInf;
  }
  level.c_resolution = level.integral.back() > 0.0 ? tol / level.integral.back() : 0.0;
  return level;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

InequalityWitness check_coercivity_basic(double gamma, const SampledPath& u, double tol_ineq) {
  require_order_le_one(gamma);
  require_zero_start(u, "u");
  const SampledPath du = fracops::caputo_derivative(FracOrder(gamma), u);
  SampledPath pairing(u.grid(), 1);
  for (std::size_t i = 0; i < u.n_nodes(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.dim(); ++k) s += u(i, k) * du(i, k);
    pairing(i) = s;
  }
  const SampledPath lhs = fracops::frac_integral(FracOrder(gamma), pairing);

  InequalityWitness w;
  w.name = "coercivity_basic";
  w.t = u.grid().nodes();
  w.lhs = lhs.values();
  w.rhs.resize(u.n_nodes());
  for (std::size_t i = 0; i < u.n_nodes(); ++i) {
    double s = 0.0;
    for (double v : u.row(i)) s += v * v;
    w.rhs[i] = 0.5 * s;
  }
  const double scale = u.max_abs();
  w.tolerance = tol_ineq * (1.0 + scale * scale);
  w.params = {{"gamma", gamma}, {"n_steps", static_cast<double>(u.grid().n_steps())}, {"tol_ineq", tol_ineq}};
  finish(w);
  return w;
}

InequalityWitness check_coercivity_matrix(double gamma, const galerkin::CoefficientField& coeffs,
                                          const std::function<SampledPath(const TimeGrid&)>& sampler,
                                          const TimeGrid& grid, double tol_ineq,
                                          std::vector<MatrixCoercivityLevel>* levels) {
  require_order_le_one(gamma);
  galerkin::validate(coeffs, grid.t_max());
  const MatrixCoercivityLevel coarse = coercivity_level(gamma, coeffs, sampler(grid), tol_ineq);
  const MatrixCoercivityLevel fine = coercivity_level(gamma, coeffs, sampler(grid.refined()), tol_ineq);

  InequalityWitness w;
  w.name = "coercivity_matrix";
  w.t = coarse.t;
  w.lhs = coarse.lhs;
  w.rhs.resize(coarse.t.size());
  const double c = std::isfinite(coarse.fitted_c) ? coarse.fitted_c : 0.0;
  for (std::size_t i = 0; i < w.rhs.size(); ++i) w.rhs[i] = coarse.energy[i] - c * coarse.integral[i];
  double scale = 0.0;
  for (double e : coarse.energy) scale = std::max(scale, 2.0 * e / coeffs.sigma0);
  w.tolerance = tol_ineq * (1.0 + scale);
  w.params = {{"gamma", gamma},
              {"n_steps", static_cast<double>(grid.n_steps())},
              {"sigma0", coeffs.sigma0},
              {"tol_ineq", tol_ineq}};
  w.fitted = {{"C_n", coarse.fitted_c}, {"C_2n", fine.fitted_c},
              {"resolution", std::max(coarse.c_resolution, fine.c_resolution)}};
  finish(w);

  const bool finite = std::isfinite(coarse.fitted_c) && std::isfinite(fine.fitted_c);
  const double spread = std::fabs(fine.fitted_c - coarse.fitted_c);
  const double allowed = 0.5 * std::max(coarse.fitted_c, fine.fitted_c) +
                         std::max(coarse.c_resolution, fine.c_resolution);
  const bool stable = finite && spread <= allowed;
  if (!finite) w.note = "no finite constant makes the inequality hold";
  else if (!stable) w.note = "fitted constant changes by more than 50% under refinement";
  w.passed = w.passed && stable;
  w.verdict = w.passed ? Verdict::Pass : Verdict::Fail;
  if (levels) *levels = {coarse, fine};
  return w;
}

InequalityWitness gronwall_certificate(const SampledPath& w, double a, double c, double gamma,
                                       double tol_ineq) {
  require_order_le_one(gamma);
  if (w.dim() != 1) throw Error(ErrorCode::InvalidArgument, "Gronwall certificate takes a scalar path");
  if (!(a >= 0.0) || !(c >= 0.0) || !std::isfinite(a) || !std::isfinite(c))
    throw Error(ErrorCode::InvalidArgument, "Gronwall constants must be finite and non-negative");
  for (double v : w.values())
    if (v < 0.0) throw Error(ErrorCode::InvalidArgument, "Gronwall path must be non-negative");

  const TimeGrid& grid = w.grid();
  const SampledPath jw = fracops::frac_integral(FracOrder(gamma), w);
  const double kernel = c * gamma_fn(gamma);
  InequalityWitness out;
  out.name = "gronwall";
  out.t = grid.nodes();
  out.tolerance = tol_ineq * (1.0 + w.max_abs());
  out.params = {{"a", a}, {"C", c}, {"gamma", gamma}, {"tol_ineq", tol_ineq}};

  std::size_t broken = grid.n_nodes();
  for (std::size_t i = 0; i < grid.n_nodes() && broken == grid.n_nodes(); ++i)
    if (w(i) > a + kernel * jw(i) + out.tolerance) broken = i;

  out.lhs.resize(grid.n_nodes());
  out.rhs = w.values();
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    const double t = grid.node(i);
    out.lhs[i] = a * mittag_leffler(gamma, kernel * std::pow(t, gamma));
  }
  finish(out);
  if (broken < grid.n_nodes()) {
    std::ostringstream msg;
    msg << "hypothesis w <= a + C int (t-s)^(gamma-1) w ds fails at t = " << grid.node(broken);
    out.note = msg.str();
    out.verdict = Verdict::NotApplicable;
  }
  return out;
}

EstimateEntry check_weak_estimate(const galerkin::SolutionBundle& bundle,
                                  const galerkin::SpectralProblem& data) {
  EstimateEntry e;
  e.name = "weak_estimate";
  e.alpha = data.alpha;
  const double u_l2 = fracops::l2_norm(bundle.p.u);
  e.lhs_terms = {{"u_Linf_H10", bundle.norms.linf_h10},
                 {"u_H1_L2", std::hypot(u_l2, bundle.norms.dt_l2_l2)},
                 {"caputo_L2_Hminus1", bundle.norms.caputo_l2_hminus1}};
  e.rhs_terms = {{"a0_H10", weighted_norm(data.a0, 1.0)},
                 {"a1_L2", data.a1.norm()},
                 {"F_L2_L2", fracops::l2_norm(data.f)}};
  set_ratio(e);
  return e;
}

double compatibility_defect(const galerkin::SpectralProblem& data) {
  const galerkin::Matrix q0 = galerkin::assemble_Q(0.0, data.coeffs, data.modes);
  const galerkin::Vector qa = q0 * data.a0;
  double defect = 0.0;
  for (std::size_t k = 0; k < data.modes; ++k)
    defect = std::max(defect, std::fabs(data.f(0, k) + qa[static_cast<Eigen::Index>(k)]));
  return defect;
}

EstimateEntry check_strong_estimate(const galerkin::SolutionBundle& bundle,
                                    const galerkin::SpectralProblem& data) {
  EstimateEntry e;
  e.name = "strong_estimate";
  e.alpha = data.alpha;
  const double defect = compatibility_defect(data);
  double scale = 0.0;
  for (double v : data.f.row(0)) scale = std::max(scale, std::fabs(v));
  scale = std::max(scale, (galerkin::assemble_Q(0.0, data.coeffs, data.modes) * data.a0).cwiseAbs().maxCoeff());
  if (defect > 1e-8 * (1.0 + scale)) {
    std::ostringstream msg;
    msg << "incompatible data: max_k |f_k(0) - (A(0) a0, phi_k)| = " << defect;
    e.verdict = Verdict::NotApplicable;
    e.note = msg.str();
    return e;
  }
  const auto lam = lambda_powers(data.modes, 0.5);
  const SampledPath grad = scaled_components(bundle.p.u, lam);
  const SampledPath grad_dt = fracops::finite_difference_derivative(grad);
  const SampledPath f_dt = fracops::finite_difference_derivative(data.f);
  e.lhs_terms = {{"caputo_Linf_L2", bundle.norms.caputo_linf_l2},
                 {"u_H1_H10", std::hypot(fracops::l2_norm(grad), fracops::l2_norm(grad_dt))},
                 {"u_Linf_H2", bundle.norms.linf_h2}};
  e.rhs_terms = {{"a0_H2", weighted_norm(data.a0, 2.0)},
                 {"a1_H10", weighted_norm(data.a1, 1.0)},
                 {"F_H1_L2", std::hypot(fracops::l2_norm(data.f), fracops::l2_norm(f_dt))}};
  set_ratio(e);
  return e;
}

BatterySummary summarize(const std::vector<EstimateEntry>& entries) {
  BatterySummary s;
  std::vector<double> ratios;
  for (const auto& e : entries) {
    if (e.verdict == Verdict::NotApplicable) continue;
    if (!std::isfinite(e.ratio) || e.ratio < 0.0) s.finite = false;
    ratios.push_back(e.ratio);
  }
  s.applicable = ratios.size();
  if (ratios.empty()) return s;
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  s.median = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
  s.max = ratios.back();
  s.uniform = s.finite && s.max <= 10.0 * s.median;
  return s;
}

galerkin::SpectralProblem random_problem(std::uint64_t seed, double alpha, const TimeGrid& grid,
                                         std::size_t modes, bool compatible) {
  Rng rng(seed);
  const double amp = rng.uniform(0.2, 0.8);
  const double omega = rng.uniform(1.0, 4.0);
  const double drift = rng.uniform(0.0, 0.5);
  const double rb = rng.uniform(-1.0, 1.0);
  const double rc = rng.uniform(0.0, 2.0);
  const double c1 = rng.uniform(-2.0, 2.0), c2 = rng.uniform(-2.0, 2.0), c3 = rng.uniform(-2.0, 2.0);
  const double d1 = rng.uniform(-2.0, 2.0), d2 = rng.uniform(-2.0, 2.0);
  const double e1 = rng.uniform(-2.0, 2.0), e2 = rng.uniform(-2.0, 2.0), e3 = rng.uniform(-2.0, 2.0);
  const double t_max = grid.t_max();

  galerkin::CoefficientField coeffs;
  coeffs.a = [=](double x, double t) {
    const double s = sin_pi(x);
    return 1.0 + amp * s * s * 0.5 * (1.0 + std::sin(omega * t)) + drift * x * t / t_max;
  };
  coeffs.b = [=](double x, double t) { return rb * std::cos(kPi * x) * std::cos(t); };
  coeffs.c = [=](double x, double t) { return rc * (1.0 + x * std::sin(t)); };
  coeffs.sigma0 = 1.0;
  coeffs.sigma1 = 1.0 + amp + drift;
  coeffs.time_dependent = true;

  auto problem = galerkin::SpectralProblem::build(
      alpha, grid, modes, std::move(coeffs),
      [=](double x) { return x * (1.0 - x) * (c1 + c2 * x + c3 * std::sin(3.0 * x)); },
      [=](double x) { return x * (1.0 - x) * (d1 + d2 * std::cos(2.0 * x)); },
      [=](double x, double t) {
        return e1 * std::cos(kPi * x * t) + e2 * x * t + e3 * std::sin(2.0 * kPi * x) * std::exp(-t);
      });
  if (compatible) {
    const galerkin::Vector shift =
        -(galerkin::assemble_Q(0.0, problem.coeffs, modes) * problem.a0) -
        Eigen::Map<const galerkin::Vector>(problem.f.row(0).data(), static_cast<Eigen::Index>(modes));
    for (std::size_t i = 0; i < grid.n_nodes(); ++i)
      for (std::size_t k = 0; k < modes; ++k) problem.f(i, k) += shift[static_cast<Eigen::Index>(k)];
  }
  return problem;
}

namespace {

std::vector<EstimateEntry> run_battery(const BatteryOptions& options, bool strong) {
  if (options.alphas.empty() || options.count == 0)
    throw Error(ErrorCode::InvalidArgument, "battery needs at least one problem and one alpha");
  const TimeGrid grid(options.t_max, options.n_steps);
  Rng seeds(options.seed);
  std::vector<std::uint64_t> problem_seeds(options.count);
  for (auto& s : problem_seeds) s = seeds.derive_seed();

  std::vector<EstimateEntry> out(options.count);
  parallel_for(options.count, options.threads, [&](std::size_t i) {
    const double alpha = options.alphas[i % options.alphas.size()];
    const auto problem = random_problem(problem_seeds[i], alpha, grid, options.modes, strong);
    const auto bundle = galerkin::solve_ibvp(problem, {2, grid.n_steps()});
    out[i] = strong ? check_strong_estimate(bundle, problem) : check_weak_estimate(bundle, problem);
    out[i].seed = problem_seeds[i];
  });
  return out;
}

}  // namespace

std::vector<EstimateEntry> weak_battery(const BatteryOptions& options) { return run_battery(options, false); }

std::vector<EstimateEntry> strong_battery(const BatteryOptions& options) { return run_battery(options, true); }

std::vector<InequalityWitness> coercivity_battery(const CoercivityOptions& options) {
  const TimeGrid grid(1.0, options.n_steps);
  const std::size_t total = options.gammas.size() * options.per_gamma;
  Rng seeds(options.seed);
  std::vector<std::uint64_t> path_seeds(total);
  for (auto& s : path_seeds) s = seeds.derive_seed();

  std::vector<InequalityWitness> out(total);
  parallel_for(total, options.threads, [&](std::size_t i) {
    const double gamma = options.gammas[i / options.per_gamma];
    out[i] = check_coercivity_basic(gamma, band_limited_path(grid, path_seeds[i], true), options.tol_ineq);
    out[i].params.emplace_back("seed", static_cast<double>(path_seeds[i]));
  });
  return out;
}

std::vector<InequalityWitness> matrix_coercivity_battery(const MatrixCoercivityOptions& options) {
  if (options.gammas.empty()) throw Error(ErrorCode::InvalidArgument, "battery needs at least one gamma");
  const TimeGrid grid(1.0, options.n_steps);
  Rng seeds(options.seed);
  std::vector<std::uint64_t> case_seeds(options.count);
  for (auto& s : case_seeds) s = seeds.derive_seed();

  std::vector<InequalityWitness> out(options.count);
  parallel_for(options.count, options.threads, [&](std::size_t i) {
    Rng rng(case_seeds[i]);
    const double amp = rng.uniform(0.2, 0.8);
    const double omega = rng.uniform(1.0, 6.0);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    galerkin::CoefficientField coeffs = galerkin::CoefficientField::constant(1.0, 0.0, 0.0);
    if (options.time_dependent) {
      coeffs.a = [=](double x, double t) {
        return 1.0 + amp * sin_pi(x) * 0.5 * (1.0 + std::sin(omega * t + phase));
      };
      coeffs.time_dependent = true;
    } else {
      coeffs.a = [=](double x, double) { return 1.0 + amp * sin_pi(x) * 0.5 * (1.0 + std::sin(phase)); };
    }
    coeffs.sigma1 = 1.0 + amp;
    std::vector<std::uint64_t> mode_seeds(options.modes);
    for (auto& s : mode_seeds) s = rng.derive_seed();
    auto sampler = [&](const TimeGrid& g) {
      SampledPath p(g, options.modes);
      for (std::size_t k = 0; k < options.modes; ++k) {
        const SampledPath pk = band_limited_path(g, mode_seeds[k], true);
        for (std::size_t n = 0; n < g.n_nodes(); ++n) p(n, k) = pk(n) / static_cast<double>(k + 1);
      }
      return p;
    };
    const double gamma = options.gammas[i % options.gammas.size()];
    out[i] = check_coercivity_matrix(gamma, coeffs, sampler, grid, options.tol_ineq);
    out[i].params.emplace_back("seed", static_cast<double>(case_seeds[i]));
  });
  return out;
}

ContinuityReport alpha_continuity(const std::function<galerkin::SpectralProblem(double)>& build,
                                  const std::vector<double>& alphas, std::size_t threads) {
  ContinuityReport report;
  report.alphas = alphas;
  const auto reference = galerkin::solve_ibvp(build(2.0), {}, {}, threads);
  for (double alpha : alphas) {
    const auto bundle = galerkin::solve_ibvp(build(alpha), {}, {}, threads);
    double d = 0.0;
    for (std::size_t i = 0; i < bundle.field.values.size(); ++i)
      d = std::max(d, std::fabs(bundle.field.values[i] - reference.field.values[i]));
    report.distances.push_back(d);
  }
  report.monotone = !report.distances.empty();
  for (std::size_t i = 1; i < report.distances.size(); ++i)
    if (!(report.distances[i] < report.distances[i - 1])) report.monotone = false;
  return report;
}

}  // namespace fracwave::verify
