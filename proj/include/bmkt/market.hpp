#pragma once

#include <cstdint>
#include <optional>

#include "bmkt/series.hpp"

namespace bmkt::market {

/// GBM parameters. Rates are per base time unit; variance_R is <R^2>.
struct MarketParams {
  double mu = 0.0;
  double sigma = 0.0;
  double variance_R = 1.0;
  double M0 = 1.0;

  void validate() const;
};

/// tau_R = sigma^2 / (2 <R^2>).
double tau_from_volatility(double sigma, double variance_R);

/// sigma = sqrt(2 <R^2> tau_R).
double sigma_from_tau(double tau_R, double variance_R);

/// Log-space GBM: ln M_n = ln M0 + mu t_n + sigma W_n. `increments` holds
/// Wiener increments; `horizon` must equal n_steps * h. Each output path has
/// n_steps + 1 prices.
PathEnsemble simulate_gbm(const MarketParams& params, const PathEnsemble& increments,
                          double horizon);

/// ln M(t_n) = ln M0 + mu t_n + h sum_{k<n} R_k; n + 1 prices per path.
PathEnsemble price_from_returns(const PathEnsemble& returns, double mu, double M0);

enum class Detrend { SampleMean, GivenMu };

/// R_n = (ln M_{n+1} - ln M_n) / h - mu with mu given or the per-path
/// sample mean of the log-rate. Throws InputError naming the first
/// nonpositive price.
PathEnsemble returns_from_prices(const PathEnsemble& prices, Detrend detrend,
                                 std::optional<double> mu = std::nullopt);

/// White-noise return-rate process dR = -R dt / tau_R + sqrt(2 <R^2>/tau_R) dW,
/// sampled exactly (AR(1) recursion) from its stationary law. n_steps points
/// per path.
PathEnsemble simulate_white_returns(double tau_R, double variance_R, double h,
                                    std::size_t n_steps, std::size_t n_paths, std::uint64_t seed);

}  // namespace bmkt::market
