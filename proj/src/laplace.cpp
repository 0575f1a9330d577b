#include "bmkt/laplace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bmkt/errors.hpp"

namespace bmkt::laplace {
namespace {

constexpr int kEulerTerms = 11;

// Binomial weights C(m, j) / 2^m of the Euler average.
constexpr std::array<double, kEulerTerms + 1> euler_weights() {
  std::array<double, kEulerTerms + 1> w{};
  double c = 1.0;
  for (int j = 0; j <= kEulerTerms; ++j) {
    w[static_cast<std::size_t>(j)] = c;
    c = c * (kEulerTerms - j) / (j + 1);
  }
  double scale = 1.0;
  for (int j = 0; j < kEulerTerms; ++j) scale *= 0.5;
  for (auto& x : w) x *= scale;
  return w;
}

constexpr auto kWeights = euler_weights();

double contour_offset(double accuracy_target) {
  return std::clamp(std::log(1.0 / accuracy_target) + 1.0, 18.4, 32.0);
}

void validate(const InversionRequest& req) {
  if (!req.shape.complex_capable() || req.shape.inversion_scale() <= 0.0)
    throw CapabilityError("laplace inversion: shape '" + req.shape.name() +
                          "' is not complex-capable; use the volterra route");
  if (req.lags.empty()) throw InputError("laplace inversion: empty lag grid");
  if (!(req.lags.front() >= 0.0)) throw InputError("laplace inversion: negative lag");
  for (std::size_t i = 1; i < req.lags.size(); ++i)
    if (!(req.lags[i] > req.lags[i - 1]))
      throw InputError("laplace inversion: lags must be strictly increasing");
  if (!(req.accuracy_target > 0.0)) throw InputError("laplace inversion: accuracy target <= 0");
}

InversionResult run(const InversionRequest& req, bool parallel) {
  validate(req);
  const std::size_t n = req.lags.size();
  InversionResult out;
  out.lags.resize(n);
  out.values.resize(n);
  std::vector<double> errs(n, 0.0);
  std::vector<double> imags(n, 0.0);
  auto one = [&](std::size_t i) {
    out.lags[i] = req.lags[i];
    out.values[i] = invert_at(req.shape, req.lags[i], req.accuracy_target, &errs[i], &imags[i],
                              req.check_symmetry);
  };
  if (parallel) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }
  const double ref = std::max(std::abs(out.values.front()), 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    out.error_estimate = std::max(out.error_estimate, errs[i]);
    out.max_imag_residue = std::max(out.max_imag_residue, imags[i] / ref);
  }
  return out;
}

}  // namespace

double invert_at(const ShapeEvaluator& shape, double t, double accuracy_target,
                 double* error_estimate, double* imag_residue, bool check_symmetry) {
  const double scale = shape.inversion_scale();
  if (t == 0.0) {
    // Initial-value theorem with one Richardson step.
    const double big = 1e6 * std::max(shape.frequency_scale(), 1e-12);
    const double v1 = (big * scale * shape(Complex{big, 0.0})).real();
    const double v2 = (2.0 * big * scale * shape(Complex{2.0 * big, 0.0})).real();
    if (error_estimate) *error_estimate = std::abs(v2 - v1) * 1e-6;
    if (imag_residue) *imag_residue = 0.0;
    return 2.0 * v2 - v1;
  }
  const double a = contour_offset(accuracy_target);
  const double omega = shape.frequency_scale();
  const int n = 40 + static_cast<int>(std::ceil(2.0 * omega * t));
  const int total = n + 2 * kEulerTerms;

  std::vector<double> partial(static_cast<std::size_t>(total) + 1);
  double sum = 0.5 * shape(Complex{a / (2.0 * t), 0.0}).real();
  double imag_sum = 0.0;
  partial[0] = sum;
  for (int k = 1; k <= total; ++k) {
    const Complex p{a / (2.0 * t), k * std::numbers::pi / t};
    const Complex f = shape(p);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (check_symmetry) {
      const Complex fc = shape(std::conj(p));
      sum += sign * 0.5 * (f.real() + fc.real());
      imag_sum += sign * 0.5 * (f.imag() + fc.imag());
    } else {
      sum += sign * f.real();
    }
    partial[static_cast<std::size_t>(k)] = sum;
  }
  auto euler = [&](int start) {
    double acc = 0.0;
    for (int j = 0; j <= kEulerTerms; ++j)
      acc += kWeights[static_cast<std::size_t>(j)] * partial[static_cast<std::size_t>(start + j)];
    return acc;
  };
  const double factor = std::exp(0.5 * a) / t * scale;
  const double value = factor * euler(n);
  const double check = factor * euler(n + kEulerTerms);
  if (error_estimate) *error_estimate = std::abs(value - check);
  if (imag_residue) *imag_residue = std::abs(factor * imag_sum);
  return value;
}

InversionResult invert(const InversionRequest& request) { return run(request, true); }

InversionResult invert_serial(const InversionRequest& request) { return run(request, false); }

AcfSeries invert_uniform(const ShapeEvaluator& shape, double step, std::size_t n,
                         double accuracy_target) {
  if (!(step > 0.0) || n == 0) throw InputError("invert_uniform: need step > 0 and n > 0");
  InversionRequest req{shape, {}, accuracy_target, false};
  req.lags.resize(n);
  for (std::size_t k = 0; k < n; ++k) req.lags[k] = static_cast<double>(k) * step;
  const auto res = invert(req);
  AcfSeries acf;
  acf.step = step;
  acf.values = res.values;
  acf.variance = shape.image_at_zero() / shape.inversion_scale();
  return acf;
}

double spectral_density(const ShapeEvaluator& shape, double omega) {
  if (!shape.complex_capable())
    throw CapabilityError("spectral density: shape '" + shape.name() +
                          "' cannot be evaluated on the imaginary axis");
  if (!std::isfinite(omega) || omega < 0.0) throw DomainError("spectral density: omega < 0");
  const double peak = 2.0 * shape.image_at_zero();
  const double s = 2.0 * shape.image_at_zero() * shape(Complex{0.0, omega}).real();
  if (s < 0.0) {
    if (s >= -kNegativeDensityClamp * std::abs(peak)) return 0.0;
    throw SpectralPositivityError("spectral density negative at omega = " + std::to_string(omega),
                                  s);
  }
  return s;
}

SpectralDensity spectral_density(const ShapeEvaluator& shape, std::span<const double> omega) {
  SpectralDensity out;
  out.omega.assign(omega.begin(), omega.end());
  out.values.reserve(omega.size());
  for (double w : omega) out.values.push_back(spectral_density(shape, w));
  return out;
}

}  // namespace bmkt::laplace
