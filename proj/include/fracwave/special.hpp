#pragma once

namespace fracwave {

/// Gamma function by the Lanczos approximation (g = 7, nine coefficients),
/// with reflection for x < 1/2. Relative accuracy is about 1e-15 on the
/// arguments the convolution weights need.
double gamma_fn(double x);

/// sin(pi * x), exact zero at integers.
double sin_pi(double x);

/// 1 / Gamma(x) in extended precision; zero at the poles x = 0, -1, -2, ...
long double reciprocal_gamma(long double x);

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z with
/// |z| <= 50. Throws UnsupportedRange outside that window or when the value
/// overflows.
double mittag_leffler(double alpha, double beta, double z);

/// E_{alpha,1}(z).
inline double mittag_leffler(double alpha, double z) { return mittag_leffler(alpha, 1.0, z); }

namespace detail {

struct MlEvaluation {
  long double value = 0.0L;
  long double error_estimate = 0.0L;
  bool converged = false;
};

/// Power series with compensated summation; `error_estimate` is driven by the
/// largest term (cancellation) and the truncation point.
MlEvaluation mittag_leffler_series(double alpha, double beta, double z, int max_terms);

/// Exponential residues plus the algebraic expansion in 1/z, truncated at
/// its smallest term.
MlEvaluation mittag_leffler_asymptotic(double alpha, double beta, double z);

}  // namespace detail

}  // namespace fracwave
