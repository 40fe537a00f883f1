#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracwave/error.hpp"
#include "fracwave/galerkin.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/special.hpp"
#include "oracle.hpp"

using namespace fracwave;
using namespace fracwave::galerkin;

namespace {

constexpr double kPi = std::numbers::pi;

double sine_mode(int k, double x) { return std::sqrt(2.0) * std::sin(k * kPi * x); }

SpectralProblem laplace_problem(double alpha, const TimeGrid& grid, std::size_t modes,
                                const SpaceField& a0, const SpaceField& a1,
                                const SpaceTimeField& f) {
  return SpectralProblem::build(alpha, grid, modes, CoefficientField::constant(1.0, 0.0, 0.0), a0, a1, f);
}

CoefficientField variable_coefficients() {
  CoefficientField c;
  c.a = [](double x, double t) { return 1.0 + 0.5 * std::sin(kPi * x) * std::exp(-t); };
  c.b = [](double x, double t) { return 0.3 * x * std::cos(t); };
  c.c = [](double x, double t) { return 1.0 + x * t; };
  c.sigma0 = 1.0;
  c.sigma1 = 1.5;
  return c;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (std::size_t order : {1u, 2u, 5u, 8u, 64u}) {
    const auto rule = gauss_legendre(order);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    // exact for x^(2n-2)
    double moment = 0.0;
    const auto deg = static_cast<double>(2 * order - 2);
    for (std::size_t i = 0; i < order; ++i) moment += rule.weights[i] * std::pow(rule.nodes[i], deg);
    CHECK(moment == doctest::Approx(2.0 / (deg + 1.0)).epsilon(1e-13));
  }
  const auto c = composite_gauss_legendre(0.0, 1.0, 32, 8);
  double integral = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) integral += c.weights[i] * std::exp(c.nodes[i]);
  CHECK(integral == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("eigenpair") {
  const auto e1 = eigenpair(1);
  CHECK(e1.lambda == doctest::Approx(9.8696044010893586).epsilon(1e-15));
  CHECK(e1.phi(0.5) == std::sqrt(2.0));
  CHECK(eigenpair(2).phi(0.5) == 0.0);
  CHECK(eigenpair(5).phi(0.0) == 0.0);
  CHECK(eigenpair(5).phi(1.0) == 0.0);
  const auto rule = gauss_legendre(64);
  double norm = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = 0.5 * (rule.nodes[i] + 1.0);
    norm += 0.5 * rule.weights[i] * eigenpair(3).phi(x) * eigenpair(3).phi(x);
    cross += 0.5 * rule.weights[i] * eigenpair(3).phi(x) * eigenpair(4).phi(x);
  }
  CHECK(std::fabs(norm - 1.0) <= 1e-12);
  CHECK(std::fabs(cross) <= 1e-12);
  CHECK(eigenpair(3).dphi(0.25) == doctest::Approx(std::sqrt(2.0) * 3 * kPi * std::cos(0.75 * kPi)));
  CHECK_THROWS_AS(eigenpair(0), Error);
  CHECK_THROWS_AS(eigenpair(-2), Error);
}

TEST_CASE("project") {
  SUBCASE("eigenfunction") {
    const Vector c = project([](double x) { return sine_mode(2, x); }, 4);
    const Vector expected = (Vector(4) << 0, 1, 0, 0).finished();
    CHECK((c - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("x(1-x) against the closed form and brute force") {
    // (x(1-x), phi_k) = 2 sqrt(2) (1 - (-1)^k) / (k pi)^3
    const Vector c = project([](double x) { return x * (1.0 - x); }, 3);
    CHECK(c[0] == doctest::Approx(4.0 * std::sqrt(2.0) / std::pow(kPi, 3)).epsilon(1e-13));
    CHECK(std::fabs(c[1]) <= 1e-15);
    CHECK(c[2] == doctest::Approx(4.0 * std::sqrt(2.0) / (27.0 * std::pow(kPi, 3))).epsilon(1e-12));
    CHECK(c[0] == doctest::Approx(0.182442).epsilon(1e-6));
    CHECK(c[2] == doctest::Approx(0.0067571).epsilon(1e-5));
    for (int k = 1; k <= 3; ++k) {
      const double brute =
          oracle::simpson([k](double x) { return x * (1.0 - x) * sine_mode(k, x); }, 0.0, 1.0, 100000);
      CHECK(std::fabs(c[k - 1] - brute) <= 1e-13);
    }
  }
  SUBCASE("zero field") { CHECK(project([](double) { return 0.0; }, 5).isZero(0.0)); }
  SUBCASE("Bessel inequality") {
    auto f = [](double x) { return std::exp(x) * std::cos(3.0 * x); };
    const Vector c = project(f, 40);
    const double l2sq = oracle::simpson([&](double x) { return f(x) * f(x); }, 0.0, 1.0, 100000);
    CHECK(c.squaredNorm() <= l2sq + 1e-12);
  }
  SUBCASE("non-finite samples") {
    try {
      project([](double x) { return x > 0.5 ? NAN : 1.0; }, 3);
      FAIL("expected an evaluation error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Evaluation);
      CHECK(std::string(e.what()).find("x = ") != std::string::npos);
    }
  }
}

TEST_CASE("assemble_Q") {
  SUBCASE("Laplacian is diagonal") {
    const Matrix q = assemble_Q(0.3, CoefficientField::constant(1.0, 0.0, 0.0), 6);
    for (int l = 0; l < 6; ++l)
      for (int k = 0; k < 6; ++k) {
        const double expected = l == k ? -eigenpair(k + 1).lambda : 0.0;
        CHECK(std::fabs(q(l, k) - expected) <= 1e-11);
      }
  }
  SUBCASE("reaction term shifts the diagonal") {
    const Matrix q = assemble_Q(0.0, CoefficientField::constant(1.0, 0.0, 1.0), 5);
    for (int k = 0; k < 5; ++k) CHECK(q(k, k) == doctest::Approx(-eigenpair(k + 1).lambda - 1.0).epsilon(1e-14));
  }
  SUBCASE("variable a against brute-force quadrature") {
    CoefficientField c = CoefficientField::constant(1.0, 0.0, 0.0);
    c.a = [](double x, double t) { return 1.0 + 0.5 * std::sin(kPi * x) * std::exp(-t); };
    c.sigma1 = 1.5;
    c.time_dependent = true;
    const Matrix q = assemble_Q(0.0, c, 4);
    for (int l = 1; l <= 4; ++l)
      for (int k = 1; k <= 4; ++k) {
        const double brute = -oracle::simpson(
            [&](double x) {
              return (1.0 + 0.5 * std::sin(kPi * x)) * eigenpair(k).dphi(x) * eigenpair(l).dphi(x);
            },
            0.0, 1.0, 100000);
        CHECK(std::fabs(q(l - 1, k - 1) - brute) <= 1e-10);
      }
  }
  SUBCASE("advection and reaction against brute force") {
    const CoefficientField c = variable_coefficients();
    const double t = 0.7;
    const Matrix q = assemble_Q(t, c, 3);
    for (int l = 1; l <= 3; ++l)
      for (int k = 1; k <= 3; ++k) {
        const auto pk = eigenpair(k), pl = eigenpair(l);
        const double brute = -oracle::simpson(
            [&](double x) {
              return c.a(x, t) * pk.dphi(x) * pl.dphi(x) +
                     (c.b(x, t) * pk.dphi(x) + c.c(x, t) * pk.phi(x)) * pl.phi(x);
            },
            0.0, 1.0, 100000);
        CHECK(std::fabs(q(l - 1, k - 1) - brute) <= 1e-10);
      }
  }
}

TEST_CASE("coefficient validation") {
  CHECK_NOTHROW(validate(variable_coefficients(), 1.0));
  const auto bounds = validate(variable_coefficients(), 1.0);
  CHECK(bounds.a_min == doctest::Approx(1.0));
  CHECK(bounds.a_max == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(bounds.dt_a_max == doctest::Approx(0.5).epsilon(1e-3));

  CoefficientField bad = variable_coefficients();
  bad.sigma1 = 1.2;
  CHECK_THROWS_AS(validate(bad, 1.0), Error);
  bad = variable_coefficients();
  bad.time_dependent = false;
  CHECK_THROWS_AS(validate(bad, 1.0), Error);
  bad = variable_coefficients();
  bad.c = [](double x, double) { return 1.0 / x; };
  CHECK_THROWS_AS(validate(bad, 1.0), Error);
}

TEST_CASE("reconstruct") {
  const TimeGrid grid(1.0, 4);
  SampledPath one(grid, 1);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) one(i) = 1.0;
  const auto lat = reconstruct(one, {0.0, 0.5, 1.0});
  CHECK(lat.at(2, 1) == std::sqrt(2.0));
  CHECK(lat.at(3, 0) == 0.0);
  CHECK(lat.at(3, 2) == 0.0);
  CHECK_THROWS_AS(reconstruct(one, {1.5}), Error);
  CHECK_THROWS_AS(reconstruct(one, {-0.1}), Error);

  SampledPath two(grid, 2);
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    two(i, 0) = std::cos(static_cast<double>(i));
    two(i, 1) = 0.25 * static_cast<double>(i) - 0.3;
  }
  std::vector<double> xs;
  for (int j = 0; j <= 10; ++j) xs.push_back(j / 10.0);
  const auto lat2 = reconstruct(two, xs, 3);
  REQUIRE(lat2.time_nodes == std::vector<std::size_t>{0, 3, 4});
  for (std::size_t ti = 0; ti < lat2.time_nodes.size(); ++ti)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const std::size_t i = lat2.time_nodes[ti];
      const double direct = two(i, 0) * sine_mode(1, xs[j]) + two(i, 1) * sine_mode(2, xs[j]);
      CHECK(std::fabs(lat2.at(ti, j) - direct) <= 1e-15);
    }
}

TEST_CASE("solve_ibvp: wave equation limit") {
  const TimeGrid grid(1.0, 2048);
  const auto problem = laplace_problem(
      2.0, grid, 1, [](double x) { return std::sin(kPi * x); }, [](double) { return 0.0; },
      [](double, double) { return 0.0; });
  CHECK(problem.a0[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const auto bundle = solve_ibvp(problem, {33, 16});
  double err = 0.0;
  for (std::size_t ti = 0; ti < bundle.field.t.size(); ++ti)
    for (std::size_t j = 0; j < bundle.field.x.size(); ++j) {
      const double exact = std::cos(kPi * bundle.field.t[ti]) * std::sin(kPi * bundle.field.x[j]);
      err = std::max(err, std::fabs(bundle.field.at(ti, j) - exact));
    }
  CHECK(err <= 1e-3);
}

TEST_CASE("solve_ibvp: two-mode Mittag-Leffler relaxation") {
  const TimeGrid grid(1.0, 2048);
  const auto problem = laplace_problem(
      1.5, grid, 2, [](double x) { return sine_mode(1, x) + 0.5 * sine_mode(2, x); },
      [](double) { return 0.0; }, [](double, double) { return 0.0; });
  CHECK(problem.a0[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(problem.a0[1] == doctest::Approx(0.5).epsilon(1e-13));
  const auto bundle = solve_ibvp(problem);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
    const double t = grid.node(i);
    for (std::size_t k = 0; k < 2; ++k) {
      const double lam = eigenpair(static_cast<long long>(k + 1)).lambda;
      const double exact = problem.a0[static_cast<Eigen::Index>(k)] * mittag_leffler(1.5, -lam * std::pow(t, 1.5));
      err = std::max(err, std::fabs(bundle.p.u(i, k) - exact));
    }
  }
  CHECK(err <= 5e-3);
}

TEST_CASE("solve_ibvp: zero data") {
  const TimeGrid grid(1.0, 64);
  const auto problem = SpectralProblem::build(
      1.5, grid, 4, variable_coefficients(), [](double) { return 0.0; }, [](double) { return 0.0; },
      [](double, double) { return 0.0; });
  const auto bundle = solve_ibvp(problem);
  CHECK(bundle.p.u.max_abs() == 0.0);
  for (double v : bundle.field.values) CHECK(v == 0.0);
  CHECK(bundle.norms.linf_h10 == 0.0);
  CHECK(bundle.norms.dt_l2_l2 == 0.0);
  CHECK(bundle.norms.linf_h2 == 0.0);
  CHECK(bundle.norms.caputo_linf_l2 == 0.0);
  CHECK(bundle.norms.caputo_l2_hminus1 == 0.0);
}

TEST_CASE("solve_ibvp: resource caps") {
  const TimeGrid grid(1.0, 16);
  auto zero = [](double) { return 0.0; };
  auto zero2 = [](double, double) { return 0.0; };
  try {
    SpectralProblem::build(1.5, grid, 257, CoefficientField::constant(1, 0, 0), zero, zero, zero2);
    FAIL("expected a resource cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResourceCap);
  }
  CHECK_THROWS_AS(SpectralProblem::build(1.5, TimeGrid(1.0, 65537), 1, CoefficientField::constant(1, 0, 0),
                                         zero, zero, zero2),
                  Error);
  const auto ok = SpectralProblem::build(1.5, grid, 8, CoefficientField::constant(1, 0, 0), zero, zero, zero2);
  CHECK_THROWS_AS(solve_ibvp(ok, {}, Limits{4, 65536}), Error);
}

TEST_CASE("solve_ibvp: decoupled modes match scalar solves") {
  const TimeGrid grid(0.5, 512);
  auto a0 = [](double x) { return x * (1.0 - x) * (1.0 + x); };
  auto a1 = [](double x) { return std::sin(3.0 * x) * (1.0 - x); };
  auto f = [](double x, double t) { return std::cos(2.0 * t) * x + t * t; };
  const std::size_t modes = 5;
  const auto problem = laplace_problem(1.7, grid, modes, a0, a1, f);
  const auto bundle = solve_ibvp(problem);
  for (std::size_t k = 0; k < modes; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    SampledPath fk(grid, 1);
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) fk(i) = problem.f(i, k);
    const fracode::FodeProblem scalar(1.7, Vector::Constant(1, problem.a0[kk]), Vector::Constant(1, problem.a1[kk]),
                                      fracode::MatrixField::constant(Matrix::Constant(1, 1, -eigenpair(kk + 1).lambda)),
                                      fk);
    const auto sol = fracode::solve_fode(scalar);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) err = std::max(err, std::fabs(sol.u(i) - bundle.p.u(i, k)));
    CAPTURE(k);
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("solve_ibvp: Parseval and boundary exactness") {
  const TimeGrid grid(1.0, 256);
  const auto problem = SpectralProblem::build(
      1.4, grid, 12, variable_coefficients(), [](double x) { return std::sin(kPi * x) * (1.0 + x); },
      [](double x) { return x * (1.0 - x); }, [](double x, double t) { return std::exp(-t) * x; });
  const auto bundle = solve_ibvp(problem, {256, 8});
  const auto& field = bundle.field;
  const double h = 1.0 / 255.0;
  for (std::size_t ti = 0; ti < field.t.size(); ++ti) {
    CHECK(field.at(ti, 0) == 0.0);
    CHECK(field.at(ti, 255) == 0.0);
    double l2 = 0.0;
    for (std::size_t j = 0; j < 256; ++j) l2 += (j == 0 || j == 255 ? 0.5 : 1.0) * h * field.at(ti, j) * field.at(ti, j);
    double spectral = 0.0;
    for (double v : bundle.p.u.row(field.time_nodes[ti])) spectral += v * v;
    CHECK(std::fabs(std::sqrt(l2) - std::sqrt(spectral)) <= 1e-3 * std::sqrt(spectral));
  }
}

TEST_CASE("solve_ibvp: spectral convergence in N") {
  // a and c are even about x = 0 and x = 1, a0 is odd and analytic under the
  // periodic extension, so the sine coefficients decay geometrically.
  CoefficientField c;
  c.a = [](double x, double) { return 1.0 + 0.3 * std::cos(2.0 * kPi * x); };
  c.b = [](double, double) { return 0.0; };
  c.c = [](double x, double) { return 0.5 + 0.5 * std::cos(2.0 * kPi * x); };
  c.sigma0 = 0.7;
  c.sigma1 = 1.3;
  c.time_dependent = false;
  auto a0 = [](double x) { return std::sin(kPi * x) / (1.25 - std::cos(kPi * x)); };
  auto zero = [](double) { return 0.0; };
  auto zero2 = [](double, double) { return 0.0; };
  const TimeGrid grid(0.5, 1024);
  auto value = [&](std::size_t modes) {
    const auto p = SpectralProblem::build(1.5, grid, modes, c, a0, zero, zero2);
    return solve_ibvp(p, {3, grid.n_steps()}).field.at(1, 1);
  };
  const double reference = value(64);
  std::vector<double> errors;
  for (std::size_t n : {2u, 4u, 8u, 16u}) errors.push_back(std::fabs(value(n) - reference));
  MESSAGE("errors: " << errors[0] << " " << errors[1] << " " << errors[2] << " " << errors[3]);
  for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] < errors[i - 1]);
  // geometric decay: the reduction factor per doubling improves each time
  for (std::size_t i = 2; i < errors.size(); ++i)
    CHECK(errors[i] / errors[i - 1] < errors[i - 1] / errors[i - 2]);
}

TEST_CASE("solve_ibvp: thread count does not change the output") {
  const TimeGrid grid(1.0, 128);
  auto build = [&](std::size_t threads) {
    return SpectralProblem::build(1.6, grid, 6, variable_coefficients(), [](double x) { return x * (1 - x); },
                                  [](double) { return 0.0; },
                                  [](double x, double t) { return std::sin(t + x); }, {}, threads);
  };
  const auto one = solve_ibvp(build(1), {17, 4}, {}, 1);
  const auto four = solve_ibvp(build(4), {17, 4}, {}, 4);
  CHECK(one.field.values == four.field.values);
  CHECK(one.p.u.values() == four.p.u.values());
}

TEST_CASE("a0 truncation in H1") {
  const TimeGrid grid(1.0, 8);
  auto zero = [](double) { return 0.0; };
  auto zero2 = [](double, double) { return 0.0; };
  auto a0 = [](double x) { return x * (1.0 - x); };
  const auto p4 = SpectralProblem::build(1.5, grid, 4, CoefficientField::constant(1, 0, 0), a0, zero, zero2);
  const auto p16 = SpectralProblem::build(1.5, grid, 16, CoefficientField::constant(1, 0, 0), a0, zero, zero2);
  CHECK(p4.a0_h1_truncation > p16.a0_h1_truncation);
  const auto exact = SpectralProblem::build(1.5, grid, 2, CoefficientField::constant(1, 0, 0),
                                            [](double x) { return sine_mode(2, x); }, zero, zero2);
  CHECK(exact.a0_h1_truncation <= 1e-5);
}
