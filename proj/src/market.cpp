#include "bmkt/market.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bmkt/errors.hpp"
#include "bmkt/noise.hpp"

namespace bmkt {

std::string to_string(PathLabel label) {
  switch (label) {
    case PathLabel::Force: return "force";
    case PathLabel::Increment: return "increment";
    case PathLabel::ReturnRate: return "return-rate";
    case PathLabel::Price: return "price";
  }
  return "unknown";
}

}  // namespace bmkt

namespace bmkt::market {
namespace {

constexpr std::uint32_t kReturnStream = 0x72657475u;

}  // namespace

void MarketParams::validate() const {
  if (!std::isfinite(mu)) throw DomainError("market: mu must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("market: sigma must be >= 0");
  if (!(variance_R > 0.0) || !std::isfinite(variance_R))
    throw DomainError("market: variance_R must be > 0");
  if (!(M0 > 0.0) || !std::isfinite(M0)) throw DomainError("market: M0 must be > 0");
}

double tau_from_volatility(double sigma, double variance_R) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError("tau_from_volatility: sigma must be >= 0");
  if (!(variance_R > 0.0) || !std::isfinite(variance_R))
    throw DomainError("tau_from_volatility: variance must be > 0");
  return sigma * sigma / (2.0 * variance_R);
}

double sigma_from_tau(double tau_R, double variance_R) {
  if (!(tau_R >= 0.0) || !std::isfinite(tau_R)) throw DomainError("sigma_from_tau: tau_R < 0");
  if (!(variance_R > 0.0) || !std::isfinite(variance_R))
    throw DomainError("sigma_from_tau: variance must be > 0");
  return std::sqrt(2.0 * variance_R * tau_R);
}

PathEnsemble simulate_gbm(const MarketParams& params, const PathEnsemble& increments,
                          double horizon) {
  params.validate();
  const double h = increments.step();
  const double expected = h * static_cast<double>(increments.n_points());
  if (!(h > 0.0) || std::abs(horizon - expected) > 1e-9 * std::max(1.0, std::abs(horizon)))
    throw InputError("simulate_gbm: horizon " + std::to_string(horizon) +
                     " does not match n_steps * h = " + std::to_string(expected));
  const std::size_t n = increments.n_points();
  PathEnsemble out(increments.n_paths(), n + 1, h, PathLabel::Price, increments.seed(),
                   increments.stream());
  const double log_m0 = std::log(params.M0);
  const auto count = static_cast<std::ptrdiff_t>(increments.n_paths());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto dw = increments.path(idx);
    auto m = out.path(idx);
    double w = 0.0;
    m[0] = params.M0;
    for (std::size_t k = 0; k < n; ++k) {
      w += dw[k];
      const double t = static_cast<double>(k + 1) * h;
      m[k + 1] = std::exp(log_m0 + params.mu * t + params.sigma * w);
    }
  }
  return out;
}

PathEnsemble price_from_returns(const PathEnsemble& returns, double mu, double M0) {
  if (!(M0 > 0.0) || !std::isfinite(M0)) throw DomainError("price_from_returns: M0 must be > 0");
  const double h = returns.step();
  if (!(h > 0.0)) throw InputError("price_from_returns: step must be > 0");
  const std::size_t n = returns.n_points();
  PathEnsemble out(returns.n_paths(), n + 1, h, PathLabel::Price, returns.seed(), returns.stream());
  const double log_m0 = std::log(M0);
  for (std::size_t i = 0; i < returns.n_paths(); ++i) {
    const auto r = returns.path(i);
    auto m = out.path(i);
    double integral = 0.0;
    m[0] = M0;
    for (std::size_t k = 0; k < n; ++k) {
      integral += h * r[k];
      m[k + 1] = std::exp(log_m0 + mu * static_cast<double>(k + 1) * h + integral);
    }
  }
  return out;
}

PathEnsemble returns_from_prices(const PathEnsemble& prices, Detrend detrend,
                                 std::optional<double> mu) {
  const double h = prices.step();
  if (!(h > 0.0)) throw InputError("returns_from_prices: step must be > 0");
  if (detrend == Detrend::GivenMu && !mu)
    throw InputError("returns_from_prices: detrend by given mu needs a value");
  if (prices.n_points() < 2) throw InputError("returns_from_prices: need at least two prices");
  const std::size_t n = prices.n_points() - 1;
  PathEnsemble out(prices.n_paths(), n, h, PathLabel::ReturnRate, prices.seed(), prices.stream());
  for (std::size_t i = 0; i < prices.n_paths(); ++i) {
    const auto m = prices.path(i);
    for (std::size_t k = 0; k < m.size(); ++k)
      if (!(m[k] > 0.0) || !std::isfinite(m[k]))
        throw InputError("returns_from_prices: nonpositive price at index " + std::to_string(k) +
                         " of path " + std::to_string(i));
    auto r = out.path(i);
    double prev = std::log(m[0]);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double cur = std::log(m[k + 1]);
      r[k] = (cur - prev) / h;
      mean += r[k];
      prev = cur;
    }
    mean /= static_cast<double>(n);
    const double shift = detrend == Detrend::SampleMean ? mean : *mu;
    for (double& v : r) v -= shift;
  }
  return out;
}

PathEnsemble simulate_white_returns(double tau_R, double variance_R, double h,
                                    std::size_t n_steps, std::size_t n_paths, std::uint64_t seed) {
  if (!(tau_R > 0.0)) throw DomainError("simulate_white_returns: tau_R must be > 0");
  if (!(variance_R > 0.0)) throw DomainError("simulate_white_returns: variance must be > 0");
  if (!(h > 0.0)) throw InputError("simulate_white_returns: h must be > 0");
  PathEnsemble out(n_paths, n_steps, h, PathLabel::ReturnRate, seed, "white-returns");
  const double a = std::exp(-h / tau_R);
  const double sd = std::sqrt(variance_R);
  const double innov = sd * std::sqrt(-std::expm1(-2.0 * h / tau_R));
  const auto count = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    auto eng = noise::path_engine(seed, kReturnStream, idx);
    std::normal_distribution<double> normal;
    auto r = out.path(idx);
    if (r.empty()) continue;
    r[0] = sd * normal(eng);
    for (std::size_t k = 1; k < r.size(); ++k) r[k] = a * r[k - 1] + innov * normal(eng);
  }
  return out;
}

}  // namespace bmkt::market
