#include "bmkt/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

#include "bmkt/errors.hpp"
#include "bmkt/laplace.hpp"

namespace bmkt::estimate {
namespace {

// psi_theta tables: s in [0, kTableSpan] at spacing kTableStep, thetas on a
// lattice of kThetaLattice. psi at other thetas is interpolated linearly
// between lattice tables.
constexpr double kTableSpan = 64.0;
constexpr double kTableStep = 0.05;
constexpr double kThetaLattice = 0.01;
constexpr double kTableAccuracy = 1e-10;

using Table = std::vector<double>;

class TableCache {
 public:
  const Table& get(long index) {
    {
      std::shared_lock lock(mutex_);
      auto it = tables_.find(index);
      if (it != tables_.end()) return *it->second;
    }
    // Built outside the lock; a concurrent builder of the same index
    // produces identical values and only the first insert is kept.
    auto table = std::make_unique<Table>(build(static_cast<double>(index) * kThetaLattice));
    std::unique_lock lock(mutex_);
    auto [it, inserted] = tables_.try_emplace(index, std::move(table));
    return *it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return tables_.size();
  }

 private:
  static Table build(double theta) {
    const auto n = static_cast<std::size_t>(std::lround(kTableSpan / kTableStep)) + 1;
    const auto shape = ShapeEvaluator::observable(ModelSpec::stock(Variant::StockTheta, 1.0, theta));
    laplace::InversionRequest req{shape, {}, kTableAccuracy, false};
    req.lags.resize(n);
    for (std::size_t k = 0; k < n; ++k) req.lags[k] = static_cast<double>(k) * kTableStep;
    return laplace::invert(req).values;
  }

  mutable std::shared_mutex mutex_;
  std::map<long, std::unique_ptr<Table>> tables_;
};

TableCache& cache() {
  static TableCache c;
  return c;
}

// Four-point Lagrange interpolation on the table.
double table_value(const Table& t, double s) {
  const double x = s / kTableStep;
  const auto last = static_cast<long>(t.size()) - 1;
  long i = static_cast<long>(std::floor(x));
  i = std::clamp(i, 1L, last - 2);
  const double u = x - static_cast<double>(i);
  const double y0 = t[static_cast<std::size_t>(i - 1)], y1 = t[static_cast<std::size_t>(i)];
  const double y2 = t[static_cast<std::size_t>(i + 1)], y3 = t[static_cast<std::size_t>(i + 2)];
  return -u * (u - 1.0) * (u - 2.0) / 6.0 * y0 + (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0 * y1 -
         (u + 1.0) * u * (u - 2.0) / 2.0 * y2 + (u + 1.0) * u * (u - 1.0) / 6.0 * y3;
}

struct Objective {
  const AcfSeries& acf;
  std::size_t lags;

  double operator()(double theta, double tau_r) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < lags; ++k) {
      const double d = acf.values[k] - stock_acf(theta, acf.lag(k) / tau_r);
      sum += d * d;
    }
    return sum / static_cast<double>(lags);
  }
};

// Golden-section minimum of f on [a, b]; returns the argmin.
template <class F>
double golden(F&& f, double a, double b, int iterations) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

double relative_curvature(double minus, double centre, double plus) {
  const double scale = std::abs(minus) + std::abs(plus) + 2.0 * std::abs(centre);
  if (!(scale > 0.0)) return 0.0;
  return std::abs(minus + plus - 2.0 * centre) / scale;
}

}  // namespace

AcfSeries sample_acf(std::span<const double> series, std::size_t max_lag, double step,
                     AcfEstimator) {
  const std::size_t n = series.size();
  if (max_lag == 0 || n < 4 * max_lag)
    throw InputError("sample_acf: series of length " + std::to_string(n) +
                     " is shorter than 4 * max_lag = " + std::to_string(4 * max_lag));
  AcfSeries out{step, std::vector<double>(max_lag + 1), 0.0};
  std::vector<double> cov(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (std::size_t i = 0; i < n - k; ++i) s += series[i] * series[i + k];
    cov[k] = s / static_cast<double>(n);
  }
  if (!(cov[0] > 0.0) || !std::isfinite(cov[0]))
    throw InputError("sample_acf: series has zero variance");
  out.variance = cov[0];
  for (std::size_t k = 0; k <= max_lag; ++k) out.values[k] = cov[k] / cov[0];
  return out;
}

EnsembleAcf ensemble_acf(const PathEnsemble& paths, std::size_t max_lag, std::size_t skip) {
  const std::size_t m = paths.n_paths();
  if (m == 0) throw InputError("ensemble_acf: empty ensemble");
  if (skip >= paths.n_points()) throw InputError("ensemble_acf: skip exceeds path length");
  // Per-path autocovariances; the ensemble ACF is the ratio of their means.
  std::vector<AcfSeries> per(m);
  bool failed = false;
  const auto count = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto path = paths.path(static_cast<std::size_t>(i)).subspan(skip);
    try {
      per[static_cast<std::size_t>(i)] = sample_acf(path, max_lag, paths.step());
    } catch (const InputError&) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) throw InputError("ensemble_acf: a path is too short or has zero variance");
  const double dm = static_cast<double>(m);
  std::vector<double> mean_cov(max_lag + 1, 0.0);
  for (const auto& a : per)
    for (std::size_t k = 0; k <= max_lag; ++k) mean_cov[k] += a.values[k] * a.variance / dm;
  EnsembleAcf out;
  out.acf = AcfSeries{paths.step(), std::vector<double>(max_lag + 1), mean_cov[0]};
  for (std::size_t k = 0; k <= max_lag; ++k) out.acf.values[k] = mean_cov[k] / mean_cov[0];
  // Delta-method standard error of the ratio estimator.
  out.standard_error.assign(max_lag + 1, 0.0);
  if (m > 1) {
    for (const auto& a : per)
      for (std::size_t k = 0; k <= max_lag; ++k) {
        const double d = (a.values[k] - out.acf.values[k]) * a.variance / mean_cov[0];
        out.standard_error[k] += d * d;
      }
    for (double& v : out.standard_error) v = std::sqrt(v / (dm - 1.0) / dm);
  }
  return out;
}

double stock_acf(double theta, double s) {
  if (!(theta >= 0.0)) throw DomainError("stock_acf: theta must be >= 0");
  s = std::abs(s);
  const double x = theta / kThetaLattice;
  const double nearest = std::round(x);
  const long lo = std::abs(x - nearest) < 1e-9 ? static_cast<long>(nearest)
                                               : static_cast<long>(std::floor(x));
  const double w = std::max(0.0, x - static_cast<double>(lo));
  if (s > kTableSpan) {
    const auto shape =
        ShapeEvaluator::observable(ModelSpec::stock(Variant::StockTheta, 1.0, theta));
    return laplace::invert_at(shape, s, kTableAccuracy);
  }
  const double a = table_value(cache().get(lo), s);
  if (w < 1e-12) return a;
  return (1.0 - w) * a + w * table_value(cache().get(lo + 1), s);
}

std::size_t cached_tables() { return cache().size(); }

FitReport fit_theta(const AcfSeries& acf, double lag_window) {
  if (!(acf.step > 0.0)) throw InputError("fit_theta: ACF step must be > 0");
  if (!(lag_window > 0.0)) throw InputError("fit_theta: lag window must be > 0");
  if (acf.values.empty() || std::abs(acf.values[0] - 1.0) > 1e-9)
    throw InputError("fit_theta: ACF must be normalized (value 1 at lag 0)");
  std::size_t lags = 0;
  while (lags < acf.size() && acf.lag(lags) <= lag_window * (1.0 + 1e-12)) ++lags;
  if (lags < 4) throw InputError("fit_theta: fewer than 4 lags inside the window");
  const Objective objective{acf, lags};

  const double tau_lo = lag_window / 50.0, tau_hi = lag_window;
  const double log_lo = std::log(tau_lo), log_hi = std::log(tau_hi);
  const double dlog = (log_hi - log_lo) / static_cast<double>(kTauGridPoints - 1);
  const auto n_theta = static_cast<std::size_t>(std::lround(kThetaMax / kThetaGridStep)) + 1;

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0, best_log = log_lo;
  for (std::size_t i = 0; i < n_theta; ++i) {
    const double theta = static_cast<double>(i) * kThetaGridStep;
    for (std::size_t j = 0; j < kTauGridPoints; ++j) {
      const double lt = log_lo + static_cast<double>(j) * dlog;
      const double v = objective(theta, std::exp(lt));
      // Strict improvement only: ties stay with the smaller theta.
      if (v < best * (1.0 - 1e-12)) {
        best = v;
        best_theta = theta;
        best_log = lt;
      }
    }
  }

  // Coordinate descent with shrinking brackets around the grid optimum.
  const double log_min = log_lo - dlog, log_max = log_hi + dlog;
  double span_theta = kThetaGridStep, span_log = dlog;
  for (int round = 0; round < 6; ++round) {
    const double t_a = std::max(0.0, best_theta - span_theta);
    const double t_b = std::min(kThetaMax, best_theta + span_theta);
    const double tau = std::exp(best_log);
    const double cand_t = golden([&](double t) { return objective(t, tau); }, t_a, t_b, 14);
    double v = objective(cand_t, tau);
    if (v < best) {
      best = v;
      best_theta = cand_t;
    }
    const double l_a = std::max(log_min, best_log - span_log);
    const double l_b = std::min(log_max, best_log + span_log);
    const double cand_l =
        golden([&](double l) { return objective(best_theta, std::exp(l)); }, l_a, l_b, 14);
    v = objective(best_theta, std::exp(cand_l));
    if (v < best) {
      best = v;
      best_log = cand_l;
    }
    span_theta *= 0.5;
    span_log *= 0.5;
  }

  FitReport report;
  report.tau_r = std::exp(best_log);
  report.theta = best_theta;
  report.variance = acf.variance;
  report.residual = std::sqrt(std::max(0.0, best));
  report.stock_class = classify_theta(best_theta);
  report.lags_used = lags;

  const double dt = 0.05, dl = 0.05;
  double curv_theta;
  if (best_theta - dt >= 0.0) {
    curv_theta = relative_curvature(objective(best_theta - dt, report.tau_r), best,
                                    objective(best_theta + dt, report.tau_r));
  } else {
    curv_theta = relative_curvature(best, objective(best_theta + dt, report.tau_r),
                                    objective(best_theta + 2.0 * dt, report.tau_r));
  }
  const double curv_tau =
      relative_curvature(objective(best_theta, std::exp(best_log - dl)), best,
                         objective(best_theta, std::exp(best_log + dl)));
  if (std::min(curv_theta, curv_tau) < kDegenerateCurvature)
    report.warnings.emplace_back("degenerate fit: objective is flat around the optimum");
  if (3.0 * report.tau_r > lag_window)
    report.warnings.emplace_back("lag window shorter than 3 fitted correlation times");
  return report;
}

}  // namespace bmkt::estimate
