#include "bmkt/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "bmkt/errors.hpp"
#include "bmkt/laplace.hpp"
#include "bmkt/noise.hpp"
#include "bmkt/simulate.hpp"
#include "bmkt/specfun.hpp"
#include "bmkt/volterra.hpp"

namespace bmkt::cli {
namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += fmt::format("{}", v);
    first = false;
  }
  out += '\n';
}

CapabilityError capability(const std::string& what) {
  return CapabilityError(what + "\n" + capability_matrix());
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
    throw InputError("price CSV line " + std::to_string(line) + ": '" + std::string(field) +
                     "' is not a number");
  return v;
}

}  // namespace

ModelSpec ModelArgs::spec() const {
  const Variant v = parse_variant(model);
  switch (v) {
    case Variant::WhiteNoise: return ModelSpec::white_noise(tau_R, variance);
    case Variant::LinearSelfSimilar: return ModelSpec::linear(tau_R, variance);
    case Variant::Boltzmann: return ModelSpec::boltzmann(tau_R, variance);
    case Variant::Differential: return ModelSpec::differential(tau_R, variance);
    default: return ModelSpec::stock(v, tau_r, theta, variance);
  }
}

Route parse_route(std::string_view name) {
  if (name == "closed") return Route::Closed;
  if (name == "laplace") return Route::Laplace;
  if (name == "volterra") return Route::Volterra;
  throw InputError("unknown route '" + std::string(name) + "' (closed, laplace, volterra)");
}

std::string to_string(Route route) {
  switch (route) {
    case Route::Closed: return "closed";
    case Route::Laplace: return "laplace";
    case Route::Volterra: return "volterra";
  }
  return "unknown";
}

std::string capability_matrix() {
  return "capabilities (model: closed laplace volterra simulate audit)\n"
         "  white:        yes   yes  yes  yes  real+complex\n"
         "  linear:       yes   yes  yes  yes  real+complex\n"
         "  stock:        theta in {0,1,2}  yes  yes  yes  real+complex\n"
         "  scaling:      no    yes  no   no   real+complex\n"
         "  fractional:   no    no   no   no   real\n"
         "  boltzmann:    no    no   yes  no   real\n"
         "  differential: no    no   yes  no   real (+ derivative check)\n";
}

std::string fig1_csv(double tau_R, double max_lag_ratio, std::size_t n_points) {
  if (!(tau_R > 0.0)) throw DomainError("fig1: tau_R must be > 0");
  if (!(max_lag_ratio > 0.0)) throw InputError("fig1: max lag ratio must be > 0");
  if (n_points < 2) throw InputError("fig1: need at least 2 points");
  std::string out = "tau_over_tau_R,lambda1,lambda0\n";
  for (std::size_t i = 0; i < n_points; ++i) {
    const double ratio = max_lag_ratio * static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double x = 2.0 * ratio;
    append_row(out, {ratio, specfun::lambda1(x), specfun::lambda0(x)});
  }
  return out;
}

std::string acf_csv(const ModelArgs& args, Route route, double step, std::size_t n_lags,
                    double tolerance) {
  const ModelSpec model = args.spec();
  model.validate();
  if (!(step > 0.0)) throw InputError("acf: step must be > 0");
  std::vector<double> values;
  switch (route) {
    case Route::Closed: {
      if (!has_closed_form(model))
        throw capability("acf: no closed form for " + args.model + " with these parameters");
      values.resize(n_lags + 1);
      for (std::size_t k = 0; k <= n_lags; ++k)
        values[k] = closed_form_acf(model, static_cast<double>(k) * step);
      break;
    }
    case Route::Laplace: {
      const auto shape = ShapeEvaluator::observable(model);
      if (!shape.complex_capable())
        throw capability("acf: " + args.model + " has no complex-plane shape to invert");
      laplace::InversionRequest req{shape, {}, tolerance, true};
      req.lags.resize(n_lags + 1);
      for (std::size_t k = 0; k <= n_lags; ++k) req.lags[k] = static_cast<double>(k) * step;
      auto res = laplace::invert(req);
      const double limit = std::max(1e3 * tolerance, 1e-6);
      if (res.error_estimate > limit)
        throw AccuracyError(fmt::format("acf: inversion error estimate {} exceeds {}",
                                        res.error_estimate, limit),
                            res.error_estimate);
      values = std::move(res.values);
      break;
    }
    case Route::Volterra: {
      if (model.variant == Variant::Scaling || model.variant == Variant::Fractional)
        throw capability("acf: no time-domain solver for " + args.model);
      values = volterra::model_acf(model, step, n_lags).values;
      break;
    }
  }
  std::string out = "lag,acf\n";
  for (std::size_t k = 0; k < values.size(); ++k)
    append_row(out, {static_cast<double>(k) * step, values[k]});
  return out;
}

SimulateOutput simulate(const SimulateArgs& args) {
  if (args.n_paths == 0 || args.n_steps < 2) throw InputError("simulate: empty ensemble");
  if (!(args.h > 0.0)) throw InputError("simulate: h must be > 0");
  SimulateOutput out;
  PathEnsemble paths;
  std::string summary = "key,value\n";
  const bool gbm = args.model.model == "gbm";
  if (gbm) {
    const auto dw = noise::generate_wiener_increments(args.n_steps, args.h, args.n_paths, args.seed);
    market::MarketParams params{args.mu, args.sigma, args.model.variance, args.M0};
    paths = market::simulate_gbm(params, dw, args.h * static_cast<double>(args.n_steps));
  } else {
    const ModelSpec model = args.model.spec();
    simulate::GleRun run;
    run.h = args.h;
    run.n_steps = args.n_steps;
    run.n_paths = args.n_paths;
    run.seed = args.seed;
    const auto returns = simulate::gle_returns(model, run);
    if (args.max_lag > 0 && 4 * args.max_lag <= args.n_steps) {
      const auto e = estimate::ensemble_acf(returns, args.max_lag);
      out.acf_csv = "lag,acf,standard_error\n";
      for (std::size_t k = 0; k < e.acf.size(); ++k)
        append_row(out.acf_csv, {e.acf.lag(k), e.acf.values[k], e.standard_error[k]});
      summary += fmt::format("sample_variance,{}\n", e.acf.variance);
    }
    paths = args.prices ? market::price_from_returns(returns, args.mu, args.M0) : returns;
  }
  summary += fmt::format("model,{}\nseed,{}\nstream,{}\nlabel,{}\nn_paths,{}\nn_points,{}\nh,{}\n",
                         args.model.model, args.seed, paths.stream(), to_string(paths.label()),
                         paths.n_paths(), paths.n_points(), args.h);
  out.summary_csv = std::move(summary);

  std::string csv = "t";
  for (std::size_t i = 0; i < paths.n_paths(); ++i) csv += fmt::format(",path_{}", i);
  csv += '\n';
  for (std::size_t k = 0; k < paths.n_points(); ++k) {
    csv += fmt::format("{}", static_cast<double>(k) * args.h);
    for (std::size_t i = 0; i < paths.n_paths(); ++i) csv += fmt::format(",{}", paths.path(i)[k]);
    csv += '\n';
  }
  out.paths_csv = std::move(csv);
  return out;
}

PriceSeries parse_price_csv(std::string_view text) {
  PriceSeries out;
  std::vector<double> times;
  std::size_t line_no = 0;
  bool header = false, with_time = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header) {
      if (line == "t,price" || line == "t,path_0") {  // the latter from simulate --prices
        with_time = true;
      } else if (line != "price") {
        throw InputError("price CSV line " + std::to_string(line_no) +
                         ": header must be 't,price', 't,path_0' or 'price'");
      }
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (with_time) {
      if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
        throw InputError("price CSV line " + std::to_string(line_no) + ": expected 2 fields");
      times.push_back(parse_number(line.substr(0, comma), line_no));
      out.prices.push_back(parse_number(line.substr(comma + 1), line_no));
    } else {
      if (comma != std::string_view::npos)
        throw InputError("price CSV line " + std::to_string(line_no) + ": expected 1 field");
      out.prices.push_back(parse_number(line, line_no));
    }
  }
  if (!header) throw InputError("price CSV: missing header");
  if (with_time && times.size() >= 2) {
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw InputError("price CSV: time column must increase");
    for (std::size_t k = 1; k < times.size(); ++k)
      if (std::abs(times[k] - times[k - 1] - h) > 1e-6 * h)
        throw InputError("price CSV line " + std::to_string(k + 2) + ": nonuniform time step");
    out.step = h;
  }
  return out;
}

estimate::FitReport estimate_prices(const PriceSeries& series, const EstimateArgs& args) {
  double h = 0.0;
  if (args.h && series.step && std::abs(*args.h - *series.step) > 1e-6 * *args.h)
    throw InputError("estimate: --step disagrees with the time column");
  if (args.h) h = *args.h;
  else if (series.step) h = *series.step;
  else throw InputError("estimate: a step is required when the CSV has no time column");
  if (!(h > 0.0)) throw InputError("estimate: step must be > 0");
  if (series.prices.size() < 17) throw InputError("estimate: need at least 17 prices");

  PathEnsemble prices(1, series.prices.size(), h, PathLabel::Price);
  std::copy(series.prices.begin(), series.prices.end(), prices.path(0).begin());
  const auto returns = market::returns_from_prices(prices, args.detrend, args.mu);
  const std::size_t n = returns.n_points();
  {
    // Returns that are constant up to rounding carry no fluctuation to fit.
    double ss = 0.0, scale = 0.0;
    for (std::size_t i = 1; i < series.prices.size(); ++i)
      scale = std::max(scale, std::abs(std::log(series.prices[i] / series.prices[i - 1])) / h);
    for (double r : returns.path(0)) ss += r * r;
    if (!(std::sqrt(ss / static_cast<double>(n)) > 1e-10 * scale))
      throw InputError("estimate: returns have zero variance");
  }
  std::size_t max_lag = std::min<std::size_t>(n / 4, 200);
  double window = static_cast<double>(max_lag) * h;
  if (args.lag_window) {
    if (!(*args.lag_window > 0.0)) throw InputError("estimate: lag window must be > 0");
    const auto want = static_cast<std::size_t>(std::floor(*args.lag_window / h + 1e-9));
    if (want > n / 4) throw InputError("estimate: lag window longer than a quarter of the series");
    max_lag = want;
    window = *args.lag_window;
  }
  const auto acf = estimate::sample_acf(returns.path(0), max_lag, h);
  return estimate::fit_theta(acf, window);
}

std::string report_csv(const estimate::FitReport& r) {
  std::string out = "key,value\n";
  out += fmt::format("tau_r,{}\ntheta,{}\nvariance,{}\nresidual,{}\nclass,{}\nlags_used,{}\n",
                     r.tau_r, r.theta, r.variance, r.residual, to_string(r.stock_class.label),
                     r.lags_used);
  for (const auto& w : r.warnings) out += fmt::format("warning,\"{}\"\n", w);
  return out;
}

AuditResult audit(const AuditArgs& args) {
  const ModelSpec model = args.model.spec();
  model.validate();
  if (!(args.p_min > 0.0) || !(args.p_max > args.p_min))
    throw InputError("audit: need 0 < p_min < p_max");
  const double tau = model.correlation_time();
  AuditResult result;
  std::string& out = result.table_csv;
  out = "check,p_re,p_im,residual,status\n";

  auto row = [&](const char* check, Complex p, auto&& compute, double limit) {
    double residual = 0.0;
    std::string status;
    try {
      residual = compute();
      status = residual <= limit ? "ok" : "fail";
    } catch (const ConvergenceError& e) {
      residual = e.residual();
      status = "nonconverged";
    }
    if (status != "ok") result.passed = false;
    if (std::isfinite(residual)) result.worst = std::max(result.worst, residual);
    else result.passed = false;
    out += fmt::format("{},{},{},{},{}\n", check, p.real(), p.imag(), residual, status);
  };

  std::vector<double> grid(args.real_points);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = grid.size() > 1 ? static_cast<double>(i) / static_cast<double>(grid.size() - 1)
                                     : 0.0;
    grid[i] = std::exp(std::log(args.p_min) + f * (std::log(args.p_max) - std::log(args.p_min))) / tau;
  }
  for (double p : grid)
    row("identity", Complex(p, 0.0), [&] { return identity_residual(model, Complex(p, 0.0)); },
        args.max_residual);

  if (model.variant == Variant::Differential) {
    const double scale = model.variance * model.tau_R;
    for (double p : grid) {
      row("derivative", Complex(p, 0.0),
          [&] {
            const double d = 1e-4 * std::max(p, 1.0 / model.tau_R);
            const double lhs = (force_image(model, Complex(p + d, 0.0)).real() -
                                force_image(model, Complex(p - d, 0.0)).real()) /
                               (2.0 * d);
            const double rhs = observable_image(model, Complex(p, 0.0)).real() / model.tau_R;
            return std::abs(lhs - rhs) / std::max(std::abs(rhs), scale / model.tau_R * 1e-12);
          },
          args.max_fd_residual);
    }
  }

  if (complex_capable(model.variant) && args.complex_points > 0) {
    std::mt19937_64 eng(args.seed);
    std::uniform_real_distribution<double> log_r(std::log(args.p_min), std::log(args.p_max));
    std::uniform_real_distribution<double> angle(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    for (std::size_t i = 0; i < args.complex_points; ++i) {
      const double r = std::exp(log_r(eng)) / tau;
      const double phi = angle(eng);
      const Complex p = std::polar(r, phi);
      row("identity", p, [&] { return identity_residual(model, p); }, args.max_residual);
    }
  }
  return result;
}

}  // namespace bmkt::cli
