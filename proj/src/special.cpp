#include "fracwave/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fracwave/error.hpp"

namespace fracwave {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

template <class Real>
Real reduced_sin_pi(Real x) {
  const Real pi = std::numbers::pi_v<Real>;
  Real y = std::fmod(x, Real(2));
  if (y < 0) y += 2;
  if (y == 0 || y == 1) return Real(0);
  if (y > 1) y -= 2;
  if (y > Real(0.5)) y = 1 - y;
  if (y < Real(-0.5)) y = -1 - y;
  return std::sin(pi * y);
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  long double sum = 0.0L;
  long double carry = 0.0L;

  void add(long double x) {
    const long double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  long double value() const { return sum + carry; }
};

constexpr long double kLongEps = 1.0842021724855044340e-19L;  // 2^-63
constexpr double kSeriesRadius = 10.0;
constexpr double kSupportedRadius = 50.0;

}  // namespace

double gamma_fn(double x) {
  if (x < 0.5) {
    const double s = sin_pi(x);
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return std::numbers::pi / (s * gamma_fn(1.0 - x));
  }
  x -= 1.0;
  double a = kLanczos[0];
  const double t = x + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double sin_pi(double x) { return reduced_sin_pi(x); }

long double reciprocal_gamma(long double x) {
  if (x > 0.5L) return 1.0L / std::tgamma(x);
  const long double s = reduced_sin_pi(x);
  if (s == 0.0L) return 0.0L;
  return s * std::tgamma(1.0L - x) / std::numbers::pi_v<long double>;
}

namespace detail {

MlEvaluation mittag_leffler_series(double alpha, double beta, double z, int max_terms) {
  MlEvaluation out;
  CompensatedSum sum;
  long double max_term = 0.0L;
  long double prev = 0.0L;
  const long double zl = z;
  for (int k = 0; k < max_terms; ++k) {
    const long double term =
        (k == 0 ? 1.0L : std::pow(zl, static_cast<long double>(k))) *
        reciprocal_gamma(static_cast<long double>(alpha) * k + beta);
    if (!std::isfinite(term)) break;
    sum.add(term);
    const long double mag = std::fabs(term);
    if (mag > max_term) max_term = mag;
    const long double partial = std::fabs(sum.value());
    if (k > 0 && mag <= prev && mag <= 1e-16L * partial) {
      out.converged = true;
      out.error_estimate = 16.0L * kLongEps * max_term + mag;
      break;
    }
    if (k > 0 && mag == 0.0L && prev == 0.0L) {
      out.converged = true;
      out.error_estimate = 16.0L * kLongEps * max_term;
      break;
    }
    prev = mag;
  }
  out.value = sum.value();
  if (!out.converged) out.error_estimate = std::numeric_limits<long double>::infinity();
  return out;
}

MlEvaluation mittag_leffler_asymptotic(double alpha, double beta, double z) {
  MlEvaluation out;
  const long double pi = std::numbers::pi_v<long double>;
  const long double a = alpha;
  const long double b = beta;
  const long double az = std::fabs(static_cast<long double>(z));
  if (az == 0.0L) return out;
  const long double r = std::pow(az, 1.0L / a);
  const long double theta = z < 0 ? pi : 0.0L;

  // Residues at the roots zeta_m = |z|^{1/alpha} exp(i (theta + 2 pi m)/alpha)
  // that lie in the principal strip; boundary roots carry half weight.
  CompensatedSum exp_part;
  const int m_max = static_cast<int>(std::ceil(alpha)) + 1;
  for (int m = -m_max; m <= m_max; ++m) {
    const long double phi = theta + 2.0L * pi * m;
    const long double limit = a * pi;
    if (std::fabs(phi) > limit * (1.0L + 1e-15L)) continue;
    const long double weight = std::fabs(std::fabs(phi) - limit) <= 1e-15L * limit ? 0.5L : 1.0L;
    const long double arg = phi / a;
    const long double magnitude = std::pow(r, 1.0L - b) * std::exp(r * std::cos(arg));
    exp_part.add(weight * magnitude * std::cos((1.0L - b) * arg + r * std::sin(arg)) / a);
  }

  // Algebraic expansion  -sum_k z^{-k} / Gamma(beta - alpha k), truncated
  // before the magnitude bound starts to grow.
  CompensatedSum algebraic;
  long double prev_bound = std::numeric_limits<long double>::infinity();
  long double error = 0.0L;
  for (int k = 1; k <= 400; ++k) {
    const long double x = b - a * k;
    const long double bound =
        std::pow(az, -static_cast<long double>(k)) *
        (x > 0.5L ? 1.0L / std::tgamma(x) : std::tgamma(1.0L - x) / pi);
    if (!std::isfinite(bound) || bound > prev_bound) {
      error = prev_bound;
      break;
    }
    const long double zk = std::pow(static_cast<long double>(z), -static_cast<long double>(k));
    algebraic.add(-zk * reciprocal_gamma(x));
    prev_bound = bound;
    error = bound;
    if (bound < 1e-22L) break;
  }
  out.value = exp_part.value() + algebraic.value();
  out.error_estimate = error + 16.0L * kLongEps * std::fabs(exp_part.value());
  out.converged = std::isfinite(out.value);
  return out;
}

}  // namespace detail

double mittag_leffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw Error(ErrorCode::InvalidArgument, "Mittag-Leffler parameters must be positive");
  if (!std::isfinite(z) || std::fabs(z) > kSupportedRadius)
    throw Error(ErrorCode::UnsupportedRange,
                "Mittag-Leffler argument " + std::to_string(z) + " outside |z| <= 50");

  constexpr int kMaxTerms = 2000;
  detail::MlEvaluation best = detail::mittag_leffler_series(alpha, beta, z, kMaxTerms);
  if (std::fabs(z) > kSeriesRadius || !best.converged) {
    // Outside the series disc the cheaper of the two estimates wins; for
    // positive z the series has no cancellation and is normally kept. Small
    // alpha with positive z can exhaust the series inside the disc too, and
    // there the exponential term dominates.
    const detail::MlEvaluation asym = detail::mittag_leffler_asymptotic(alpha, beta, z);
    if (asym.converged && (!best.converged || asym.error_estimate < best.error_estimate))
      best = asym;
  }
  const double value = static_cast<double>(best.value);
  if (!best.converged || !std::isfinite(value))
    throw Error(ErrorCode::UnsupportedRange,
                "Mittag-Leffler E(" + std::to_string(alpha) + "," + std::to_string(beta) +
                    ") cannot be evaluated at z=" + std::to_string(z));
  return value;
}

}  // namespace fracwave
