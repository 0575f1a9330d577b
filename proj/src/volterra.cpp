#include "bmkt/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmkt/errors.hpp"
#include "bmkt/specfun.hpp"

namespace bmkt::volterra {
namespace {

void check_step(double h) {
  if (!std::isfinite(h) || h <= 0.0) throw InputError("volterra: step must be > 0");
}

// Index one past the last nonzero kernel sample.
std::size_t kernel_support(const KernelSeries& k) {
  std::size_t s = k.values.size();
  while (s > 0 && k.values[s - 1] == 0.0) --s;
  return s;
}

// sum_{j=lo}^{hi} K[n - j] x[j]
inline double conv_tail(const double* kv, const double* x, std::size_t n, std::size_t lo,
                        std::size_t hi) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t j = lo; j <= hi; ++j) acc += kv[n - j] * x[j];
  return acc;
}

// Shared stepping for propagate_acf and integrate_gle. `force` may be empty.
void step_memory_equation(const KernelSeries& kernel, std::span<const double> force, double h,
                          std::vector<double>& x) {
  const std::size_t n_points = x.size();
  const double* kv = kernel.values.data();
  const std::size_t support = kernel_support(kernel);
  const double k0 = kernel.values.empty() ? 0.0 : kv[0];
  const double beta = 0.5 * h * k0 + kernel.local_rate;
  const double denom = 1.0 + 0.5 * h * beta;
  double memory = kernel.local_rate * x[0];  // I_0
  for (std::size_t n = 0; n + 1 < n_points; ++n) {
    const std::size_t next = n + 1;
    // J_{n+1} = h [K_{n+1} x_0 / 2 + sum_{j=1}^{n} K_{n+1-j} x_j]
    double j_next = 0.0;
    if (next < support) j_next += 0.5 * kv[next] * x[0];
    if (n >= 1 && support > 1) {
      const std::size_t lo = next >= support ? next - support + 1 : 1;
      if (lo <= n) j_next += conv_tail(kv, x.data(), next, lo, n);
    }
    j_next *= h;
    double rhs = x[n] - 0.5 * h * (memory + j_next);
    if (!force.empty()) {
      // A delta-correlated force only has its left sample in the step; a
      // smooth colored force is integrated by the trapezoid rule.
      rhs += kernel.local_rate > 0.0 ? h * force[n] : 0.5 * h * (force[n] + force[next]);
    }
    x[next] = rhs / denom;
    memory = j_next + beta * x[next];
  }
}

}  // namespace

KernelSeries rubin_kernel(double tau_R, double h, std::size_t n) {
  check_step(h);
  if (!(tau_R > 0.0)) throw DomainError("rubin_kernel: tau_R must be > 0");
  KernelSeries k{h, std::vector<double>(n), 0.0};
  const double amp = 1.0 / (tau_R * tau_R);
  for (std::size_t j = 0; j < n; ++j)
    k.values[j] = amp * specfun::lambda1(2.0 * static_cast<double>(j) * h / tau_R);
  return k;
}

KernelSeries stock_kernel(double tau_r, double theta, double h, std::size_t n) {
  check_step(h);
  if (!(tau_r > 0.0)) throw DomainError("stock_kernel: tau_r must be > 0");
  if (!(theta >= 0.0)) throw DomainError("stock_kernel: theta must be >= 0");
  if (theta == 0.0) return white_kernel(tau_r, h, n);
  const double tau_R = theta * tau_r;
  KernelSeries k{h, std::vector<double>(n), 0.0};
  const double amp = 1.0 / (tau_r * tau_R);
  for (std::size_t j = 0; j < n; ++j)
    k.values[j] = amp * specfun::lambda1(2.0 * static_cast<double>(j) * h / tau_R);
  return k;
}

KernelSeries white_kernel(double tau, double h, std::size_t n) {
  check_step(h);
  if (!(tau > 0.0)) throw DomainError("white_kernel: tau must be > 0");
  return KernelSeries{h, std::vector<double>(n, 0.0), 1.0 / tau};
}

KernelSeries model_kernel(const ModelSpec& model, double h, std::size_t n) {
  model.validate();
  switch (model.variant) {
    case Variant::WhiteNoise: return white_kernel(model.tau_R, h, n);
    case Variant::LinearSelfSimilar: return rubin_kernel(model.tau_R, h, n);
    case Variant::StockTheta: return stock_kernel(model.tau_r, model.theta(), h, n);
    default:
      throw CapabilityError("model_kernel: no time-domain kernel for " +
                            to_string(model.variant));
  }
}

AcfSeries propagate_acf(const KernelSeries& kernel, std::size_t steps) {
  check_step(kernel.step);
  if (kernel.values.size() < steps + 1 && kernel_support(kernel) > 0)
    throw InputError("propagate_acf: horizon exceeds kernel support (" +
                     std::to_string(kernel.values.size()) + " samples for " +
                     std::to_string(steps) + " steps)");
  AcfSeries acf{kernel.step, std::vector<double>(steps + 1, 0.0), 1.0};
  acf.values[0] = 1.0;
  step_memory_equation(kernel, {}, kernel.step, acf.values);
  return acf;
}

AcfSeries propagate_self_consistent(double tau_corr, std::size_t steps, double h) {
  check_step(h);
  if (!(tau_corr > 0.0)) throw DomainError("propagate_self_consistent: tau_corr must be > 0");
  if (h > tau_corr / 50.0)
    throw DomainError("propagate_self_consistent: step exceeds tau_corr / 50 (stability guard)");
  const double inv_tau2 = 1.0 / (tau_corr * tau_corr);
  std::vector<double> c(steps + 1, 0.0);
  c[0] = 1.0;
  // kernel = c / tau^2; K_0 = 1/tau^2 and the K_{n+1} c_0 end term both
  // carry the unknown c_{n+1}.
  const double beta = 0.5 * h * inv_tau2 * (1.0 + c[0]);
  const double denom = 1.0 + 0.5 * h * beta;
  double memory = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    double j_next = 0.0;
    if (n >= 1) j_next = conv_tail(c.data(), c.data(), n + 1, 1, n);
    j_next *= h * inv_tau2;
    c[n + 1] = (c[n] - 0.5 * h * (memory + j_next)) / denom;
    memory = j_next + beta * c[n + 1];
  }
  return AcfSeries{h, std::move(c), 1.0};
}

namespace {

struct ClosureCoefficients {
  double a;
  double b;
};

// March t c = c*c + a (tc)*c + b c*c*c from c_0 = 1 and a trial c_1.
std::vector<double> march_closure(ClosureCoefficients k, double c1, double h, std::size_t steps) {
  std::vector<double> c(steps + 1, 0.0);
  std::vector<double> tc(steps + 1, 0.0);
  std::vector<double> cc(steps + 1, 0.0);  // (c*c)_n
  c[0] = 1.0;
  if (steps == 0) return c;
  c[1] = c1;
  tc[1] = h * c1;
  cc[1] = h * c1;  // h/2 (c_0 c_1 + c_1 c_0)
  for (std::size_t n = 2; n <= steps; ++n) {
    const double tn = static_cast<double>(n) * h;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
#pragma omp simd reduction(+ : s1, s2, s3)
    for (std::size_t j = 1; j < n; ++j) {
      s1 += c[j] * c[n - j];
      s2 += tc[j] * c[n - j];
      s3 += c[j] * cc[n - j];
    }
    const double coef = tn - h - 0.5 * k.a * h * tn - 0.5 * k.b * h * h;
    const double rhs = h * s1 + k.a * h * s2 + k.b * h * (0.5 * h * s1 + s3);
    c[n] = rhs / coef;
    if (!std::isfinite(c[n]) || std::abs(c[n]) > 1e6) {
      std::fill(c.begin() + static_cast<std::ptrdiff_t>(n), c.end(),
                std::copysign(HUGE_VAL, c[n]));
      return c;
    }
    tc[n] = tn * c[n];
    cc[n] = h * (c[n] + s1);
  }
  return c;
}

}  // namespace

AcfSeries propagate_closure(const ModelSpec& model, double h, std::size_t steps) {
  model.validate();
  check_step(h);
  ClosureCoefficients k{};
  if (model.variant == Variant::Boltzmann) {
    k = {-1.0 / model.tau_R, 0.0};
  } else if (model.variant == Variant::Differential) {
    k = {0.0, 1.0 / model.tau_R};
  } else {
    throw CapabilityError("propagate_closure: only boltzmann and differential models");
  }
  if (h > model.tau_R / 10.0) throw DomainError("propagate_closure: step exceeds tau_R / 10");

  const double p = 4.0 / model.tau_R;
  const double target = model.tau_R * observable_shape(model, Complex{p, 0.0}).real();
  const auto shoot_steps = static_cast<std::size_t>(std::ceil(10.0 * model.tau_R / h));
  auto mismatch = [&](double c1) {
    const auto c = march_closure(k, c1, h, shoot_steps);
    double acc = 0.5 * c[0];
    for (std::size_t j = 1; j < c.size(); ++j) {
      const double w = std::exp(-p * static_cast<double>(j) * h) * c[j];
      acc += (j + 1 == c.size()) ? 0.5 * w : w;
    }
    const double r = h * acc - target;
    return std::isfinite(r) ? r : HUGE_VAL;
  };
  // The mismatch increases with c_1; bisect to full precision.
  double lo = 0.5;
  double hi = 1.5;
  if (!(mismatch(lo) < 0.0) || !(mismatch(hi) > 0.0))
    throw ConvergenceError("propagate_closure: shooting bracket lost", mismatch(1.0));
  for (int it = 0; it < 200 && hi - lo > 4e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mismatch(mid) < 0.0 ? lo : hi) = mid;
  }
  auto c = march_closure(k, 0.5 * (lo + hi), h, std::max(steps, std::size_t{1}));
  c.resize(steps + 1);
  for (double v : c)
    if (!std::isfinite(v))
      throw AccuracyError("propagate_closure: solution diverged over the horizon", HUGE_VAL);
  return AcfSeries{h, std::move(c), model.variance};
}

AcfSeries model_acf(const ModelSpec& model, double h, std::size_t steps) {
  model.validate();
  switch (model.variant) {
    case Variant::LinearSelfSimilar: {
      auto acf = propagate_self_consistent(model.tau_R, steps, h);
      acf.variance = model.variance;
      return acf;
    }
    case Variant::WhiteNoise:
    case Variant::StockTheta: {
      auto acf = propagate_acf(model_kernel(model, h, steps + 1), steps);
      acf.variance = model.variance;
      return acf;
    }
    case Variant::Boltzmann:
    case Variant::Differential:
      return propagate_closure(model, h, steps);
    default:
      throw CapabilityError("volterra route: no time-domain solver for " +
                            to_string(model.variant));
  }
}

std::vector<double> integrate_gle(const KernelSeries& kernel, std::span<const double> noise,
                                  double r0, double h) {
  check_step(h);
  if (std::abs(kernel.step - h) > 1e-12 * h)
    throw InputError("integrate_gle: kernel step differs from noise step");
  std::vector<double> x(noise.size(), 0.0);
  if (x.empty()) return x;
  x[0] = r0;
  step_memory_equation(kernel, noise, h, x);
  return x;
}

namespace {

PathEnsemble ensemble(const KernelSeries& kernel, const PathEnsemble& noise,
                      std::span<const double> r0, bool parallel) {
  if (r0.size() != noise.n_paths())
    throw InputError("integrate_gle_ensemble: one initial value per path required");
  PathEnsemble out(noise.n_paths(), noise.n_points(), noise.step(), PathLabel::ReturnRate,
                   noise.seed(), noise.stream());
  const auto count = static_cast<std::ptrdiff_t>(noise.n_paths());
  auto one = [&](std::ptrdiff_t i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto path = integrate_gle(kernel, noise.path(idx), r0[idx], noise.step());
    std::copy(path.begin(), path.end(), out.path(idx).begin());
  };
  if (parallel) {
    // Validate once outside the parallel region so exceptions stay serial.
    if (count > 0) one(0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 1; i < count; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  }
  return out;
}

}  // namespace

PathEnsemble integrate_gle_ensemble(const KernelSeries& kernel, const PathEnsemble& noise,
                                    std::span<const double> r0) {
  return ensemble(kernel, noise, r0, true);
}

PathEnsemble integrate_gle_ensemble_serial(const KernelSeries& kernel, const PathEnsemble& noise,
                                           std::span<const double> r0) {
  return ensemble(kernel, noise, r0, false);
}

}  // namespace bmkt::volterra
