#include "bmkt/models.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "bmkt/errors.hpp"
#include "bmkt/specfun.hpp"

namespace bmkt {
namespace {

constexpr double kThetaTolerance = 1e-12;
constexpr int kMaxContinuedFractionDepth = 1 << 16;

// sqrt(1 + u^2) on the branch that is analytic for Re u > 0 and continuous
// onto the imaginary axis from the right.
Complex rhp_sqrt1p_sq(Complex u) {
  if (u.real() == 0.0) {
    const double v = u.imag();
    if (std::abs(v) <= 1.0) return {std::sqrt((1.0 - v) * (1.0 + v)), 0.0};
    return {0.0, std::copysign(std::sqrt((v - 1.0) * (v + 1.0)), v)};
  }
  return std::sqrt(1.0 + u * u);
}

// sqrt(1 + u^2) - u written without cancellation.
Complex market_shape(Complex u) { return 1.0 / (rhp_sqrt1p_sq(u) + u); }

void require_rhp(Complex p) {
  if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
    throw DomainError("shape evaluation: non-finite frequency");
  if (p.real() < 0.0) throw DomainError("shape evaluation: Re p < 0");
}

double require_real(const ModelSpec& m, Complex p) {
  if (p.imag() != 0.0)
    throw CapabilityError(to_string(m.variant) + " shapes are evaluated on the real axis only");
  return p.real();
}

struct BoltzmannParts {
  double y;
  double g;
};

BoltzmannParts boltzmann(double u) {
  const double w = specfun::lambert_w0_of_exp(1.0 + u);
  return {std::exp(w - 1.0 - u), w - u};
}

BoltzmannParts differential(double u) {
  const double w = specfun::lambert_wm1_of_negexp(std::numbers::ln2 - 2.0 - u);
  const double inv_y = -1.0 - w;
  return {1.0 / inv_y, inv_y - u};
}

// y(p) = 1 / (tau_r p + y(theta p)) evaluated as a continued fraction of
// the given depth; the tail uses the theta = 1 fixed point at the deepest
// frequency.
Complex scaling_fraction(double tau_r, double theta, Complex p, int depth) {
  const Complex x0 = tau_r * p;
  auto x_at = [&](int k) { return x0 * std::pow(theta, k); };
  while (depth > 0 && std::abs(x_at(depth)) > 1e100) --depth;
  const Complex x_tail = x_at(depth);
  Complex y = std::abs(x_tail) > 1e50 ? 1.0 / x_tail : market_shape(0.5 * x_tail);
  for (int k = depth - 1; k >= 0; --k) y = 1.0 / (x_at(k) + y);
  return y;
}

std::pair<Complex, int> scaling_shape(double tau_r, double theta, Complex p) {
  if (p == Complex{0.0, 0.0}) return {1.0, 0};
  if (theta == 0.0) return {1.0 / (tau_r * p + 1.0), 1};
  if (std::abs(theta - 1.0) <= kThetaTolerance) return {market_shape(0.5 * tau_r * p), 1};
  Complex prev = scaling_fraction(tau_r, theta, p, 8);
  for (int depth = 16; depth <= kMaxContinuedFractionDepth; depth *= 2) {
    const Complex cur = scaling_fraction(tau_r, theta, p, depth);
    if (std::abs(cur - prev) <= 1e-15 * std::abs(cur)) return {cur, depth};
    prev = cur;
  }
  const Complex g = scaling_fraction(tau_r, theta, theta * p, kMaxContinuedFractionDepth);
  throw ConvergenceError("scaling shape: continued fraction did not converge",
                         std::abs(prev * (tau_r * p + g) - 1.0));
}

std::pair<double, int> fractional_shape(double tau_r, double theta, double p) {
  const double x = tau_r * p;
  if (x == 0.0) return {1.0, 0};
  auto f = [&](double y) { return y * (x + std::pow(y, theta)) - 1.0; };
  double lo = 0.0;
  double hi = 1.0;
  int it = 0;
  for (; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double y = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {
    const double fp = x + (theta + 1.0) * std::pow(y, theta);
    const double next = y - f(y) / fp;
    if (next > lo && next <= hi) y = next;
  }
  return {y, it};
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::WhiteNoise: return "white";
    case Variant::LinearSelfSimilar: return "linear";
    case Variant::StockTheta: return "stock";
    case Variant::Scaling: return "scaling";
    case Variant::Fractional: return "fractional";
    case Variant::Boltzmann: return "boltzmann";
    case Variant::Differential: return "differential";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::WhiteNoise, Variant::LinearSelfSimilar, Variant::StockTheta,
                    Variant::Scaling, Variant::Fractional, Variant::Boltzmann,
                    Variant::Differential}) {
    if (to_string(v) == name) return v;
  }
  throw InputError("unknown model '" + std::string(name) + "'");
}

ModelSpec ModelSpec::white_noise(double tau_R, double variance) {
  ModelSpec m{Variant::WhiteNoise, tau_R, tau_R, variance};
  m.validate();
  return m;
}

ModelSpec ModelSpec::linear(double tau_R, double variance) {
  ModelSpec m{Variant::LinearSelfSimilar, tau_R, tau_R, variance};
  m.validate();
  return m;
}

ModelSpec ModelSpec::boltzmann(double tau_R, double variance) {
  ModelSpec m{Variant::Boltzmann, tau_R, tau_R, variance};
  m.validate();
  return m;
}

ModelSpec ModelSpec::differential(double tau_R, double variance) {
  ModelSpec m{Variant::Differential, tau_R, tau_R, variance};
  m.validate();
  return m;
}

ModelSpec ModelSpec::stock(Variant variant, double tau_r, double theta, double variance) {
  if (!std::isfinite(theta) || theta < 0.0) throw DomainError("stock model: theta must be >= 0");
  ModelSpec m{variant, theta * tau_r, tau_r, variance};
  if (!m.is_stock()) throw InputError("stock(): " + to_string(variant) + " is not a stock variant");
  m.validate();
  return m;
}

bool ModelSpec::is_stock() const noexcept {
  return variant == Variant::StockTheta || variant == Variant::Scaling ||
         variant == Variant::Fractional;
}

void ModelSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(variance)) throw DomainError("model: variance must be > 0");
  if (!positive(tau_r)) throw DomainError("model: tau_r must be > 0");
  if (is_stock()) {
    if (!std::isfinite(tau_R) || tau_R < 0.0) throw DomainError("model: tau_R must be >= 0");
  } else if (!positive(tau_R)) {
    throw DomainError("model: tau_R must be > 0");
  }
}

std::string to_string(StockLabel label) {
  switch (label) {
    case StockLabel::Heavy: return "heavy";
    case StockLabel::Neutral: return "neutral";
    case StockLabel::Light: return "light";
    case StockLabel::UltraLight: return "ultralight";
  }
  return "unknown";
}

StockClass classify_theta(double theta) {
  if (!std::isfinite(theta) || theta < 0.0)
    throw DomainError("classify_theta: theta must be finite and >= 0");
  StockLabel label = StockLabel::UltraLight;
  if (theta < 2.0 / 3.0) {
    label = StockLabel::Heavy;
  } else if (theta < 4.0 / 3.0) {
    label = StockLabel::Neutral;
  } else if (theta < 2.0) {
    label = StockLabel::Light;
  }
  return {label, theta};
}

bool complex_capable(Variant v) noexcept {
  switch (v) {
    case Variant::WhiteNoise:
    case Variant::LinearSelfSimilar:
    case Variant::StockTheta:
    case Variant::Scaling:
      return true;
    default:
      return false;
  }
}

Complex observable_shape(const ModelSpec& m, Complex p) {
  require_rhp(p);
  switch (m.variant) {
    case Variant::WhiteNoise: return 1.0 / (1.0 + m.tau_R * p);
    case Variant::LinearSelfSimilar: return market_shape(0.5 * m.tau_R * p);
    case Variant::StockTheta:
      return 1.0 / (m.tau_r * p + market_shape(0.5 * m.tau_R * p));
    case Variant::Scaling: return scaling_shape(m.tau_r, m.theta(), p).first;
    case Variant::Fractional: {
      const double x = require_real(m, p);
      return fractional_shape(m.tau_r, m.theta(), x).first;
    }
    case Variant::Boltzmann: return boltzmann(m.tau_R * require_real(m, p)).y;
    case Variant::Differential: return differential(m.tau_R * require_real(m, p)).y;
  }
  throw CapabilityError("observable_shape: unknown variant");
}

Complex force_shape(const ModelSpec& m, Complex p) {
  require_rhp(p);
  switch (m.variant) {
    case Variant::WhiteNoise: return 1.0;
    case Variant::LinearSelfSimilar:
    case Variant::StockTheta:
      return market_shape(0.5 * m.tau_R * p);
    case Variant::Scaling: return scaling_shape(m.tau_r, m.theta(), m.theta() * p).first;
    case Variant::Fractional: {
      const double x = require_real(m, p);
      return std::pow(fractional_shape(m.tau_r, m.theta(), x).first, m.theta());
    }
    case Variant::Boltzmann: return boltzmann(m.tau_R * require_real(m, p)).g;
    case Variant::Differential: return differential(m.tau_R * require_real(m, p)).g;
  }
  throw CapabilityError("force_shape: unknown variant");
}

Complex observable_image(const ModelSpec& m, Complex p) {
  return m.variance * m.correlation_time() * observable_shape(m, p);
}

Complex force_image(const ModelSpec& m, Complex p) {
  return m.variance / m.correlation_time() * force_shape(m, p);
}

double identity_residual(const ModelSpec& m, Complex p) {
  const Complex y = observable_shape(m, p);
  const Complex g = force_shape(m, p);
  return std::abs(y * (m.correlation_time() * p + g) - 1.0);
}

bool has_closed_form(const ModelSpec& m) noexcept {
  switch (m.variant) {
    case Variant::WhiteNoise:
    case Variant::LinearSelfSimilar:
      return true;
    case Variant::StockTheta: {
      const double th = m.theta();
      for (double k : {0.0, 1.0, 2.0})
        if (std::abs(th - k) <= kThetaTolerance) return true;
      return false;
    }
    default:
      return false;
  }
}

double closed_form_acf(const ModelSpec& m, double tau) {
  if (!std::isfinite(tau) || tau < 0.0) throw DomainError("closed_form_acf: lag must be >= 0");
  if (!has_closed_form(m))
    throw CapabilityError("closed_form_acf: no closed form for " + to_string(m.variant) +
                          (m.variant == Variant::StockTheta ? " at this theta" : ""));
  switch (m.variant) {
    case Variant::WhiteNoise: return std::exp(-tau / m.tau_R);
    case Variant::LinearSelfSimilar: return specfun::lambda1(2.0 * tau / m.tau_R);
    default: break;
  }
  const double th = m.theta();
  const double s = tau / m.tau_r;
  if (std::abs(th) <= kThetaTolerance) return std::exp(-s);
  if (std::abs(th - 1.0) <= kThetaTolerance) return specfun::lambda1(2.0 * s);
  return specfun::bessel_j0(s);
}

FunctionalSolution solve_functional_shape(const ModelSpec& m, double p) {
  if (!std::isfinite(p) || p < 0.0) throw DomainError("solve_functional_shape: p must be >= 0");
  FunctionalSolution out;
  const double x = m.tau_r * p;
  double g = 0.0;
  if (m.variant == Variant::Scaling) {
    const auto [y, depth] = scaling_shape(m.tau_r, m.theta(), p);
    out.value = y.real();
    out.iterations = depth;
    g = scaling_shape(m.tau_r, m.theta(), m.theta() * p).first.real();
  } else if (m.variant == Variant::Fractional) {
    const auto [y, iterations] = fractional_shape(m.tau_r, m.theta(), p);
    out.value = y;
    out.iterations = iterations;
    g = std::pow(y, m.theta());
  } else {
    throw CapabilityError("solve_functional_shape: only scaling and fractional models");
  }
  out.residual = std::abs(out.value * (x + g) - 1.0);
  if (out.residual > 1e-10)
    throw ConvergenceError("functional shape residual above 1e-10", out.residual);
  return out;
}

ShapeEvaluator ShapeEvaluator::observable(const ModelSpec& model) {
  model.validate();
  ShapeEvaluator s;
  s.fn_ = [model](Complex p) { return observable_shape(model, p); };
  s.kind_ = Kind::Observable;
  s.complex_capable_ = bmkt::complex_capable(model.variant);
  s.inversion_scale_ = model.correlation_time();
  const double market_rate = model.tau_R > 0.0 ? 2.0 / model.tau_R : 0.0;
  s.frequency_scale_ = std::max(market_rate, 1.0 / model.correlation_time());
  s.image_at_zero_ = model.variance * model.correlation_time();
  s.name_ = to_string(model.variant) + ":observable";
  return s;
}

ShapeEvaluator ShapeEvaluator::force(const ModelSpec& model) {
  model.validate();
  ShapeEvaluator s;
  s.fn_ = [model](Complex p) { return force_shape(model, p); };
  s.kind_ = Kind::Force;
  // A constant force spectrum is a delta correlation: no inversion exists.
  s.complex_capable_ = bmkt::complex_capable(model.variant) && model.variant != Variant::WhiteNoise &&
                       model.tau_R > 0.0;
  s.inversion_scale_ = model.tau_R;
  const double market_rate = model.tau_R > 0.0 ? 2.0 / model.tau_R : 0.0;
  s.frequency_scale_ = std::max(market_rate, 1.0 / model.correlation_time());
  s.image_at_zero_ = model.variance / model.correlation_time();
  s.name_ = to_string(model.variant) + ":force";
  return s;
}

ShapeEvaluator ShapeEvaluator::custom(std::function<Complex(Complex)> fn, double inversion_scale,
                                      double frequency_scale, double image_at_zero,
                                      bool complex_capable, std::string name) {
  ShapeEvaluator s;
  s.fn_ = std::move(fn);
  s.kind_ = Kind::Custom;
  s.complex_capable_ = complex_capable;
  s.inversion_scale_ = inversion_scale;
  s.frequency_scale_ = frequency_scale;
  s.image_at_zero_ = image_at_zero;
  s.name_ = std::move(name);
  return s;
}

}  // namespace bmkt
