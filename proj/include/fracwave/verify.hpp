#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fracwave/galerkin.hpp"
#include "fracwave/grid.hpp"

namespace fracwave::verify {

inline constexpr double kTolIneq = 5e-3;

enum class Verdict { Pass, Fail, NotApplicable };
const char* to_string(Verdict v);

using NamedValues = std::vector<std::pair<std::string, double>>;

/// lhs >= rhs - tolerance at every checkpoint (orientation fixed by the check).
struct InequalityWitness {
  std::string name;
  std::vector<double> t;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double margin = 0.0;  ///< min over checkpoints of lhs - rhs
  double tolerance = 0.0;
  bool passed = false;
  Verdict verdict = Verdict::Fail;
  std::string note;
  NamedValues fitted;
  NamedValues params;
};

/// J^gamma[<d^gamma u, u>](t) >= |u(t)|^2 / 2 for u(0) = 0, 0 < gamma <= 1.
/// Tolerance tol_ineq * (1 + ||u||_inf^2). Throws TraceViolation if u(0) != 0.
InequalityWitness check_coercivity_basic(double gamma, const SampledPath& u,
                                         double tol_ineq = kTolIneq);

/// Right-hand sides of the second coercivity inequality at one grid level.
struct MatrixCoercivityLevel {
  std::size_t n_steps = 0;
  double fitted_c = 0.0;
  double c_resolution = 0.0;  ///< tolerance / int_0^T ||v||^2
  std::vector<double> t;
  std::vector<double> lhs;       ///< J^gamma[ int a v d^gamma v dx ]
  std::vector<double> energy;    ///< sigma0/2 ||v(t)||^2
  std::vector<double> integral;  ///< int_0^t ||v||^2
};

/// Gradient data v = d_x u_N given by spectral coefficients p(t) (dim N):
/// int a v d^gamma v dx = p^T S(t) d^gamma p with S_kl = int a phi_k' phi_l',
/// ||v||^2 = sum lambda_k p_k^2. The constant C in
///   lhs >= sigma0/2 ||v(t)||^2 - C int_0^t ||v||^2
/// is fitted on `grid` and on its refinement; the witness passes when both
/// fits are finite and agree within 50% (up to the fit resolution).
InequalityWitness check_coercivity_matrix(double gamma, const galerkin::CoefficientField& coeffs,
                                          const std::function<SampledPath(const TimeGrid&)>& sampler,
                                          const TimeGrid& grid, double tol_ineq = kTolIneq,
                                          std::vector<MatrixCoercivityLevel>* levels = nullptr);

/// Generalized Gronwall: if w <= a + C int_0^t (t-s)^{gamma-1} w(s) ds at every
/// node (within tolerance), then w(t) <= a E_gamma(C Gamma(gamma) t^gamma).
/// A failed hypothesis gives Verdict::NotApplicable.
InequalityWitness gronwall_certificate(const SampledPath& w, double a, double c, double gamma,
                                       double tol_ineq = kTolIneq);

struct EstimateEntry {
  std::string name;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  Verdict verdict = Verdict::Pass;  ///< NotApplicable when a hypothesis is rejected
  std::string note;
  NamedValues lhs_terms;
  NamedValues rhs_terms;
};

/// lhs = ||u||_{L^inf H^1_0} + ||u||_{H^1(0,T;L2)} + ||d^alpha v||_{L2(0,T;H^-1)},
/// rhs = ||a0||_{H^1_0} + ||a1||_{L2} + ||F||_{L2(0,T;L2)}, all on the Galerkin subspace.
EstimateEntry check_weak_estimate(const galerkin::SolutionBundle& bundle,
                                  const galerkin::SpectralProblem& data);

/// Compatibility defect max_k |f_k(0) + (Q(0) a0)_k|, i.e. F(0) - A(0) a0 on the subspace.
double compatibility_defect(const galerkin::SpectralProblem& data);

/// lhs = ||d^alpha v||_{L^inf L2} + ||u||_{H^1(0,T;H^1_0)} + ||u||_{L^inf H^2},
/// rhs = ||a0||_{H^2} + ||a1||_{H^1_0} + ||F||_{H^1(0,T;L2)}. Incompatible data
/// (defect above 1e-8 (1 + scale)) are rejected as NotApplicable.
EstimateEntry check_strong_estimate(const galerkin::SolutionBundle& bundle,
                                    const galerkin::SpectralProblem& data);

struct BatterySummary {
  std::size_t applicable = 0;
  double median = 0.0;
  double max = 0.0;
  bool finite = true;
  bool uniform = false;  ///< max <= 10 median
};

BatterySummary summarize(const std::vector<EstimateEntry>& entries);

/// Seeded variable-coefficient problem family used by the batteries.
/// With `compatible`, f is shifted by a constant so that f(0) + Q(0) a0 = 0.
galerkin::SpectralProblem random_problem(std::uint64_t seed, double alpha, const TimeGrid& grid,
                                         std::size_t modes, bool compatible);

struct BatteryOptions {
  std::uint64_t seed = 1;
  std::size_t count = 20;
  std::vector<double> alphas{1.2, 1.5, 1.8};
  double t_max = 1.0;
  std::size_t n_steps = 512;
  std::size_t modes = 6;
  std::size_t threads = 1;
};

/// Problem i uses alpha = alphas[i % size] and a seed drawn from options.seed.
std::vector<EstimateEntry> weak_battery(const BatteryOptions& options);
std::vector<EstimateEntry> strong_battery(const BatteryOptions& options);

struct CoercivityOptions {
  std::uint64_t seed = 1;
  std::size_t per_gamma = 100;
  std::vector<double> gammas{0.3, 0.5, 0.9};
  std::size_t n_steps = 1024;
  double tol_ineq = kTolIneq;
  std::size_t threads = 1;
};

/// Band-limited random paths with u(0) = 0; witnesses ordered by (gamma, sample).
std::vector<InequalityWitness> coercivity_battery(const CoercivityOptions& options);

struct MatrixCoercivityOptions {
  std::uint64_t seed = 1;
  std::size_t count = 9;
  std::vector<double> gammas{0.3, 0.5, 0.9};
  std::size_t n_steps = 256;
  std::size_t modes = 3;
  double tol_ineq = kTolIneq;
  bool time_dependent = true;  ///< false: a depends on x only
  std::size_t threads = 1;
};

std::vector<InequalityWitness> matrix_coercivity_battery(const MatrixCoercivityOptions& options);

struct ContinuityReport {
  std::vector<double> alphas;
  std::vector<double> distances;  ///< max lattice distance to the alpha = 2 run
  bool monotone = false;
};

/// Solves `build(alpha)` for each alpha and for alpha = 2 and compares fields.
ContinuityReport alpha_continuity(const std::function<galerkin::SpectralProblem(double)>& build,
                                  const std::vector<double>& alphas, std::size_t threads = 1);

}  // namespace fracwave::verify
