#include "bmkt/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bmkt/errors.hpp"

namespace bmkt::specfun {
namespace {

void require_finite(double x, const char* fn) {
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

// J0 and J1 together by Miller's backward recurrence, normalized with
// J0 + 2 (J2 + J4 + ...) = 1. Valid for x > 0.
struct BesselPair {
  double j0;
  double j1;
};

BesselPair miller(double x) {
  int start = static_cast<int>(x + 30.0 + 12.0 * std::cbrt(x));
  if (start % 2 == 1) ++start;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k
  double norm = 0.0;
  double j1 = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = 2.0 * k / x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 == 1) j1 = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
  }
  norm += cur;
  return {cur / norm, j1 / norm};
}

}  // namespace

double bessel_j0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) || std::abs(term) < 1e-22) break;
  }
  return sum;
}

double bessel_j1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) || std::abs(term) < 1e-22) break;
  }
  return sum;
}

double bessel_j0_recurrence(double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 1.0;
  return miller(ax).j0;
}

double bessel_j1_recurrence(double x) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  const double v = miller(ax).j1;
  return x < 0 ? -v : v;
}

double bessel_j0(double x) {
  require_finite(x, "bessel_j0");
  return std::abs(x) <= kBesselSeriesLimit ? bessel_j0_series(x) : bessel_j0_recurrence(x);
}

double bessel_j1(double x) {
  require_finite(x, "bessel_j1");
  return std::abs(x) <= kBesselSeriesLimit ? bessel_j1_series(x) : bessel_j1_recurrence(x);
}

double lambda1(double x) {
  require_finite(x, "lambda1");
  if (x < 0.0) throw DomainError("lambda1: negative argument");
  if (x < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 8.0 + x2 * x2 / 192.0;
  }
  return 2.0 * bessel_j1(x) / x;
}

double lambda0(double x) {
  require_finite(x, "lambda0");
  if (x < 0.0) throw DomainError("lambda0: negative argument");
  return bessel_j0(0.5 * x);
}

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double halley(double x, double w) {
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) return w;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(w))) break;
  }
  return w;
}

// Series about the branch point in p = +-sqrt(2 (e x + 1)).
double branch_point_guess(double p) {
  return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

}  // namespace

double lambert_w0(double x) {
  require_finite(x, "lambert_w0");
  const double t = std::numbers::e * x + 1.0;
  if (t < 0.0) {
    if (t > -1e-15) return -1.0;  // rounding of -1/e
    throw DomainError("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;
  if (t < 1e-30) return -1.0;
  double w;
  if (x < -0.25) {
    w = branch_point_guess(std::sqrt(2.0 * t));
  } else if (x < 3.0) {
    w = std::log1p(x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(x, w);
}

double lambert_wm1(double x) {
  require_finite(x, "lambert_wm1");
  if (x >= 0.0) throw DomainError("lambert_wm1: argument must be negative");
  const double t = std::numbers::e * x + 1.0;
  if (t < 0.0) {
    if (t > -1e-15) return -1.0;
    throw DomainError("lambert_wm1: argument below -1/e");
  }
  if (t < 1e-30) return -1.0;
  double w;
  if (x < -0.25) {
    w = branch_point_guess(-std::sqrt(2.0 * t));
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  return halley(x, w);
}

double lambert_w0_of_exp(double z) {
  require_finite(z, "lambert_w0_of_exp");
  if (z < 30.0) return lambert_w0(std::exp(z));
  double w = z - std::log(z);
  for (int it = 0; it < 50; ++it) {
    const double f = w + std::log(w) - z;
    const double step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) < 1e-15 * w) break;
  }
  return w;
}

double lambert_wm1_of_negexp(double a) {
  require_finite(a, "lambert_wm1_of_negexp");
  if (a > -1.0) {
    if (a < -1.0 + 1e-15) return -1.0;
    throw DomainError("lambert_wm1_of_negexp: exp(a) exceeds 1/e");
  }
  if (a > -30.0) return lambert_wm1(-std::exp(a));
  // v = -w >= 1 solves v - ln v = -a.
  const double b = -a;
  double v = b + std::log(b);
  for (int it = 0; it < 50; ++it) {
    const double f = v - std::log(v) - b;
    const double step = f / (1.0 - 1.0 / v);
    v -= step;
    if (std::abs(step) < 1e-15 * v) break;
  }
  return -v;
}

}  // namespace bmkt::specfun
