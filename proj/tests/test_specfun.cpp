#include <doctest.h>

#include <cmath>

#include "bmkt/errors.hpp"
#include "bmkt/specfun.hpp"

using namespace bmkt;
using namespace bmkt::specfun;

namespace {

// Power series in long double, summed to convergence; an independent check
// for moderate arguments.
long double series_jn(int n, long double x) {
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= x / 2.0L / k;
  long double sum = term;
  const long double q = -x * x / 4.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) < 1e-24L * std::fabs(sum) && k > 5) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("Bessel J0 and J1 match the standard library") {
  for (double x = 0.0; x <= 120.0; x += 0.173) {
    CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-13);
    CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-13);
  }
}

TEST_CASE("Bessel reference values and long double series") {
  CHECK(std::abs(bessel_j0(1.0) - 0.7651976865579666) < 1e-15);
  CHECK(std::abs(bessel_j1(1.0) - 0.4400505857449335) < 1e-15);
  CHECK(std::abs(bessel_j1(2.0) - 0.5767248077568734) < 1e-15);
  for (double x = 0.05; x < 12.0; x += 0.37) {
    CHECK(std::abs(bessel_j0(x) - static_cast<double>(series_jn(0, x))) < 1e-13);
    CHECK(std::abs(bessel_j1(x) - static_cast<double>(series_jn(1, x))) < 1e-13);
  }
}

TEST_CASE("series and recurrence branches agree where both are valid") {
  for (double x = 4.0; x <= 12.0; x += 0.25) {
    CHECK(std::abs(bessel_j0_series(x) - bessel_j0_recurrence(x)) < 1e-12);
    CHECK(std::abs(bessel_j1_series(x) - bessel_j1_recurrence(x)) < 1e-12);
  }
  CHECK(bessel_j0(-3.0) == bessel_j0(3.0));
  CHECK(bessel_j1(-3.0) == -bessel_j1(3.0));
}

TEST_CASE("lambda functions") {
  CHECK(lambda1(0.0) == 1.0);
  CHECK(lambda0(0.0) == 1.0);
  // Small-argument branch is continuous with the direct formula.
  for (double x : {1e-6, 5e-5, 9.9e-5, 1.01e-4, 2e-4, 1e-3})
    CHECK(std::abs(lambda1(x) - (1.0 - x * x / 8.0 + x * x * x * x / 192.0)) < 1e-15);
  for (double x = 0.1; x < 50.0; x += 0.7) {
    CHECK(std::abs(lambda1(x) - 2.0 * std::cyl_bessel_j(1.0, x) / x) < 1e-14);
    CHECK(std::abs(lambda0(x) - std::cyl_bessel_j(0.0, x / 2.0)) < 1e-14);
  }
  // First zero of J1 is 3.8317059702...
  CHECK(lambda1(3.83170597) * lambda1(3.83170598) < 0.0);
  CHECK(lambda0(2.0 * 2.40482555) * lambda0(2.0 * 2.40482556) < 0.0);
}

TEST_CASE("Lambert W principal branch") {
  CHECK(std::abs(lambert_w0(0.0)) == 0.0);
  CHECK(std::abs(lambert_w0(std::exp(1.0)) - 1.0) < 1e-15);
  CHECK(std::abs(lambert_w0(-std::exp(-1.0)) + 1.0) < 1e-7);
  for (double x : {-0.36, -0.3, -0.1, 1e-8, 0.5, 1.0, 10.0, 1e3, 1e10, 1e300}) {
    const double w = lambert_w0(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-14 * std::max(1.0, std::abs(x)));
    CHECK(w >= -1.0);
  }
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
}

TEST_CASE("Lambert W lower branch") {
  CHECK(std::abs(lambert_wm1(-0.1) + 3.577152063957297) < 1e-13);
  for (double x : {-0.3678, -0.3, -0.1, -1e-3, -1e-10, -1e-300}) {
    const double w = lambert_wm1(x);
    CHECK(w <= -1.0);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-13 * std::abs(x));
  }
  CHECK_THROWS_AS(lambert_wm1(0.1), DomainError);
  CHECK_THROWS_AS(lambert_wm1(-0.5), DomainError);
}

TEST_CASE("overflow-free Lambert forms") {
  for (double z : {-30.0, -1.0, 0.0, 1.0, 5.0, 50.0, 800.0, 1e6}) {
    const double w = lambert_w0_of_exp(z);
    CHECK(std::abs(w + std::log(w) - z) <= 1e-13 * std::max(1.0, std::abs(z)));
  }
  for (double a : {-1.0, -1.001, -1.5, -3.0, -10.0, -700.0, -1e5}) {
    const double w = lambert_wm1_of_negexp(a);
    CHECK(w <= -1.0);
    CHECK(std::abs(w + std::log(-w) - a) <= 1e-12 * std::abs(a));
  }
  CHECK(std::abs(lambert_wm1_of_negexp(std::log(0.1)) + 3.577152063957297) < 1e-13);
}
