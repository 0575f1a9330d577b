#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bmkt/models.hpp"
#include "bmkt/series.hpp"

namespace bmkt::estimate {

enum class AcfEstimator { Biased };

/// Biased (divide-by-N) sample autocovariance of a zero-centered series,
/// normalized so values[0] == 1; `variance` holds the lag-0 value. Needs
/// series.size() >= 4 * max_lag. A zero-variance series throws InputError.
AcfSeries sample_acf(std::span<const double> series, std::size_t max_lag, double step,
                     AcfEstimator estimator = AcfEstimator::Biased);

/// Ensemble ACF: mean autocovariance over paths divided by the mean variance,
/// with the delta-method standard error at each lag. Uses the biased
/// estimator, so lag k has expectation (1 - k/N) times the true ACF.
struct EnsembleAcf {
  AcfSeries acf;
  std::vector<double> standard_error;
};

/// `skip` leading samples of every path are dropped first.
EnsembleAcf ensemble_acf(const PathEnsemble& paths, std::size_t max_lag, std::size_t skip = 0);

struct FitReport {
  double tau_r = 0.0;
  double theta = 0.0;
  double variance = 0.0;
  double residual = 0.0;  ///< RMS misfit over the fitted lags
  StockClass stock_class{StockLabel::Heavy, 0.0};
  std::size_t lags_used = 0;
  std::vector<std::string> warnings;
};

/// Objective and search limits of fit_theta().
inline constexpr double kThetaMax = 4.0;
inline constexpr double kThetaGridStep = 0.1;
inline constexpr std::size_t kTauGridPoints = 48;
inline constexpr double kDegenerateCurvature = 1e-6;

/// Least-squares fit of the stock ACF psi_theta(t / tau_r) to a normalized
/// ACF over lags in [0, lag_window]: coarse (theta, log tau_r) grid, then
/// coordinate descent. Ties go to the smaller theta. Flat objectives and
/// short windows are reported as warnings.
FitReport fit_theta(const AcfSeries& acf, double lag_window);

/// Normalized stock ACF psi_theta(s), s = t / tau_r, from the shared
/// per-theta table (built once, read concurrently).
double stock_acf(double theta, double s);

/// Number of theta tables currently held by the cache.
std::size_t cached_tables();

}  // namespace bmkt::estimate
