#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracwave/error.hpp"
#include "fracwave/special.hpp"

using namespace fracwave;

namespace {

struct MlReference {
  double alpha, beta, z, value;
};

// Generated by tests/oracles/mittag_leffler_reference.py (1200-digit series).
constexpr MlReference kReferences[] = {
    {1.5, 1.0, -1.0, 0.39662936531808808449},
    {1.5, 1.0, -5.0, -0.3000820504131308808},
    {1.5, 1.0, -9.869604401089358, -0.11527434844270770233},
    {1.5, 1.0, -10.0, -0.10971305425274014669},
    {1.5, 1.0, -10.5, -0.089378231613256126139},
    {1.5, 1.0, -15.0, 0.015536484967868308042},
    {1.5, 1.0, -20.0, 0.019595747930187505735},
    {1.5, 1.0, -30.0, -0.014470224834105874553},
    {1.5, 1.0, -39.47841760435743, -0.010394373315704579867},
    {1.5, 1.0, -50.0, -0.0045783851058392779913},
    {1.1, 1.0, -10.0, -0.013146977309068898752},
    {1.1, 1.0, -20.0, -0.0053076272063481054949},
    {1.1, 1.0, -35.0, -0.0028604846814947568581},
    {1.1, 1.0, -50.0, -0.0019600956729167986789},
    {1.9, 1.0, -25.0, 0.43534902705681804333},
    {1.9, 1.0, -50.0, 0.022022145114234175889},
    {1.99, 1.0, -50.0, 0.62140500424633934108},
    {0.5, 1.0, -20.0, 0.028174348741051319319},
    {0.5, 1.0, -50.0, 0.0112815362653237725},
    {0.9, 1.0, -30.0, 0.003713707698459852111},
    {1.5, 2.0, -30.0, 0.019875580087330172014},
    {1.5, 2.5, -45.0, 0.022362754150131748668},
    {1.0, 1.0, -12.0, 6.1442123533282097587e-6},
    {0.3, 1.0, -8.0, 0.089493095818620724136},
};

// Values too large for an absolute tolerance; compared relatively.
constexpr MlReference kLargeReferences[] = {
    {0.5, 1.0, 3.0, 16205.988853999586625},
    {1.5, 1.0, 20.0, 1056.3880787316900215},
    {0.8, 1.0, 4.0, 357.76652035563980857},
    {0.5, 0.5, 2.0, 218.44599836350370111},
    {0.3, 1.0, 3.271152, 1.2269219434258992067e+23},
    {0.3, 1.0, 1.0, 8.0406755969670582905},
    {0.4, 1.0, 6.0, 4.9514870137951647453e+38},
};

}  // namespace

TEST_CASE("Lanczos gamma matches the C library") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.3, 3.5, 4.0, 7.25, 12.0, 25.5}) {
    CHECK(gamma_fn(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-13));
  }
  CHECK(gamma_fn(-0.5) == doctest::Approx(std::tgamma(-0.5)).epsilon(1e-13));
  CHECK(gamma_fn(1.5) == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));
}

TEST_CASE("sin_pi is exact at integers and reciprocal gamma vanishes at poles") {
  for (double k : {-3.0, -1.0, 0.0, 1.0, 2.0, 17.0}) CHECK(sin_pi(k) == 0.0);
  CHECK(sin_pi(0.5) == doctest::Approx(1.0));
  CHECK(sin_pi(-0.25) == doctest::Approx(-std::sqrt(0.5)));
  CHECK(reciprocal_gamma(0.0L) == 0.0L);
  CHECK(reciprocal_gamma(-2.0L) == 0.0L);
  CHECK(static_cast<double>(reciprocal_gamma(-0.5L)) ==
        doctest::Approx(1.0 / std::tgamma(-0.5)).epsilon(1e-15));
}

TEST_CASE("Mittag-Leffler special cases") {
  CHECK(mittag_leffler(1.0, 1.0, 1.0) == doctest::Approx(2.718281828459045).epsilon(1e-14));
  const double half_pi = std::numbers::pi / 2;
  CHECK(std::fabs(mittag_leffler(2.0, 1.0, -half_pi * half_pi)) <= 1e-10);
  CHECK(mittag_leffler(1.5, 1.0, 0.0) == 1.0);
  CHECK(mittag_leffler(1.5, 2.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("Mittag-Leffler identities on [-5, 5]") {
  for (int i = 0; i <= 100; ++i) {
    const double z = -5.0 + 0.1 * i;
    CHECK(std::fabs(mittag_leffler(1.0, 1.0, z) - std::exp(z)) <= 1e-10 * std::max(1.0, std::exp(z)));
    CHECK(std::fabs(mittag_leffler(2.0, 1.0, -z * z) - std::cos(z)) <= 1e-10);
  }
}

TEST_CASE("Mittag-Leffler against the high-precision series oracle") {
  for (const auto& ref : kReferences) {
    CAPTURE(ref.alpha);
    CAPTURE(ref.beta);
    CAPTURE(ref.z);
    CHECK(std::fabs(mittag_leffler(ref.alpha, ref.beta, ref.z) - ref.value) <= 1e-10);
  }
  for (const auto& ref : kLargeReferences) {
    CAPTURE(ref.z);
    CHECK(mittag_leffler(ref.alpha, ref.beta, ref.z) ==
          doctest::Approx(ref.value).epsilon(1e-12));
  }
}

TEST_CASE("Mittag-Leffler series and asymptotic branches agree at the crossover") {
  for (double alpha : {1.1, 1.5, 1.9, 2.0}) {
    const auto series = detail::mittag_leffler_series(alpha, 1.0, -10.0, 400);
    const double value = mittag_leffler(alpha, 1.0, -10.0 - 1e-12);
    CAPTURE(alpha);
    CHECK(series.converged);
    CHECK(std::fabs(static_cast<double>(series.value) - value) <= 1e-10);
  }
  // alpha = 2: the expansion collapses to cos exactly.
  const auto asym = detail::mittag_leffler_asymptotic(2.0, 1.0, -30.0);
  CHECK(static_cast<double>(asym.value) == doctest::Approx(std::cos(std::sqrt(30.0))).epsilon(1e-14));
}

TEST_CASE("Mittag-Leffler rejects unsupported arguments") {
  CHECK_THROWS_AS(mittag_leffler(1.5, 1.0, -50.5), Error);
  CHECK_THROWS_AS(mittag_leffler(1.5, 1.0, NAN), Error);
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(mittag_leffler(0.2, 1.0, 50.0), Error);  // overflows
  try {
    mittag_leffler(1.5, 1.0, 60.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedRange);
  }
}
