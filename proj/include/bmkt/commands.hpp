#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bmkt/estimate.hpp"
#include "bmkt/market.hpp"
#include "bmkt/models.hpp"

namespace bmkt::cli {

/// Model selection shared by acf, simulate and audit. Stock variants use
/// tau_r and theta; the others use tau_R.
struct ModelArgs {
  std::string model = "linear";
  double tau_R = 1.0;
  double tau_r = 1.0;
  double theta = 1.0;
  double variance = 1.0;

  ModelSpec spec() const;
};

enum class Route { Closed, Laplace, Volterra };
Route parse_route(std::string_view name);
std::string to_string(Route route);

/// Which (model, route) pairs are implemented, as a printable table.
std::string capability_matrix();

/// Columns tau/tau_R, Lambda1(2 tau/tau_R), Lambda0(2 tau/tau_R) on
/// n_points equally spaced rows over [0, max_lag_ratio].
std::string fig1_csv(double tau_R, double max_lag_ratio, std::size_t n_points);

/// Columns lag, acf for lags k * step, k = 0..n_lags. Unsupported pairs
/// throw CapabilityError carrying the matrix.
std::string acf_csv(const ModelArgs& model, Route route, double step, std::size_t n_lags,
                    double tolerance);

struct SimulateArgs {
  ModelArgs model;  ///< "gbm" selects a price simulation from mu, sigma, M0
  std::size_t n_paths = 1;
  std::size_t n_steps = 1024;
  double h = 0.01;
  std::uint64_t seed = 0;
  std::size_t max_lag = 100;
  bool prices = false;  ///< convert returns to prices with mu and M0
  double mu = 0.0;
  double sigma = 0.0;
  double M0 = 1.0;
};

struct SimulateOutput {
  std::string paths_csv;    ///< t, path_0, ...
  std::string acf_csv;      ///< lag, acf, standard_error (empty for prices)
  std::string summary_csv;  ///< key, value including the seed lineage
};

SimulateOutput simulate(const SimulateArgs& args);

struct PriceSeries {
  std::vector<double> prices;
  std::optional<double> step;  ///< from the t column when present
};

/// Header `t,price`, `t,path_0` (single-path simulate output) or `price`.
/// Throws InputError naming the line.
PriceSeries parse_price_csv(std::string_view text);

struct EstimateArgs {
  std::optional<double> h;
  market::Detrend detrend = market::Detrend::SampleMean;
  std::optional<double> mu;
  std::optional<double> lag_window;
};

estimate::FitReport estimate_prices(const PriceSeries& series, const EstimateArgs& args);

/// key,value lines for a fit report.
std::string report_csv(const estimate::FitReport& report);

struct AuditArgs {
  ModelArgs model;
  double p_min = 1e-3;  ///< in units of 1 / correlation time
  double p_max = 1e3;
  std::size_t real_points = 100;
  std::size_t complex_points = 100;
  std::uint64_t seed = 0x5eed;
  double max_residual = 1e-10;
  double max_fd_residual = 1e-6;  ///< finite-difference rows
};

struct AuditResult {
  std::string table_csv;  ///< check, p_re, p_im, residual, status
  bool passed = true;
  double worst = 0.0;
};

AuditResult audit(const AuditArgs& args);

}  // namespace bmkt::cli
