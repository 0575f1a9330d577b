#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bmkt/commands.hpp"
#include "bmkt/config.hpp"
#include "bmkt/errors.hpp"

namespace fs = std::filesystem;
using namespace bmkt;

namespace {

void write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_model_options(CLI::App* app, cli::ModelArgs& m) {
  app->add_option("--model", m.model,
                  "white, linear, stock, scaling, fractional, boltzmann, differential")
      ->capture_default_str();
  app->add_option("--tau-R", m.tau_R, "market correlation time")->capture_default_str();
  app->add_option("--tau-r", m.tau_r, "stock correlation time")->capture_default_str();
  app->add_option("--theta", m.theta, "tau_R / tau_r for stock models")->capture_default_str();
  app->add_option("--variance", m.variance, "<R^2> or <r^2>")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bmkt: Brownian market models, ACF routes, simulation and estimation"};
  app.require_subcommand(1);
  app.footer(cli::capability_matrix());

  std::string config_path, out_dir, unit;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "seed for randomized commands");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--tolerance", tolerance, "numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--unit", unit, "time unit of every time-like input; must match the config");
  app.fallthrough();

  // fig1
  double fig_tau = 1.0, fig_ratio = 10.0;
  std::size_t fig_points = 1001;
  auto* fig1 = app.add_subcommand("fig1", "Lambda1 and Lambda0 against tau/tau_R (fig1.csv)");
  fig1->add_option("--tau-R", fig_tau, "market correlation time")->capture_default_str();
  fig1->add_option("--max-lag-ratio", fig_ratio, "largest tau/tau_R")->capture_default_str();
  fig1->add_option("--points", fig_points, "number of rows")->capture_default_str();

  // acf
  cli::ModelArgs acf_model;
  std::string route = "laplace";
  double acf_step = 0.05;
  std::size_t acf_lags = 200;
  auto* acf = app.add_subcommand("acf", "normalized ACF of a model by one route (acf.csv)");
  add_model_options(acf, acf_model);
  acf->add_option("--route", route, "closed, laplace or volterra")->capture_default_str();
  acf->add_option("--step", acf_step, "lag spacing")->capture_default_str();
  acf->add_option("--lags", acf_lags, "number of lags after 0")->capture_default_str();
  acf->footer(cli::capability_matrix());

  // simulate
  cli::SimulateArgs sim;
  sim.model.model = "linear";
  auto* simc = app.add_subcommand(
      "simulate", "GLE return paths or GBM prices (paths.csv, acf.csv, summary.csv)");
  add_model_options(simc, sim.model);
  simc->get_option("--model")->description("white, linear or stock (GLE returns), or gbm (prices from --mu, --sigma)");
  simc->add_option("--paths", sim.n_paths, "number of paths")->capture_default_str();
  simc->add_option("--steps", sim.n_steps, "samples per path")->capture_default_str();
  simc->add_option("--step", sim.h, "time step")->capture_default_str();
  simc->add_option("--max-lag", sim.max_lag, "lags in the summary ACF")->capture_default_str();
  simc->add_flag("--prices", sim.prices, "emit prices instead of return rates");
  simc->add_option("--mu", sim.mu, "mean return rate")->capture_default_str();
  simc->add_option("--sigma", sim.sigma, "volatility (model gbm)")->capture_default_str();
  simc->add_option("--M0", sim.M0, "initial price")->capture_default_str();
  simc->footer("--model gbm simulates prices directly from mu, sigma and M0.\n" +
               cli::capability_matrix());

  // estimate
  std::string prices_path, detrend = "sample-mean";
  cli::EstimateArgs est;
  auto* estc = app.add_subcommand("estimate", "fit tau_r and theta to a price series");
  estc->add_option("prices", prices_path, "CSV with header 't,price', 't,path_0' or 'price'")->required();
  estc->add_option("--step", est.h, "sampling step (else from the t column)");
  estc->add_option("--detrend", detrend, "sample-mean or given")->capture_default_str();
  estc->add_option("--mu", est.mu, "mean rate for --detrend given");
  estc->add_option("--lag-window", est.lag_window, "fit window in time units");
  estc->footer("Fits the stock model (closed/laplace routes, theta in [0, 4]).\n" +
               cli::capability_matrix());

  // audit
  cli::AuditArgs aud;
  auto* audc = app.add_subcommand("audit", "identity residuals on a p grid (audit.csv)");
  add_model_options(audc, aud.model);
  audc->add_option("--p-min", aud.p_min, "smallest |p| times the correlation time")
      ->capture_default_str();
  audc->add_option("--p-max", aud.p_max, "largest |p| times the correlation time")
      ->capture_default_str();
  audc->add_option("--real-points", aud.real_points, "log-spaced real p")->capture_default_str();
  audc->add_option("--complex-points", aud.complex_points, "random right-half-plane p")
      ->capture_default_str();
  audc->add_option("--max-residual", aud.max_residual, "identity rows pass at or below this")
      ->capture_default_str();
  audc->add_option("--max-fd-residual", aud.max_fd_residual, "derivative rows pass at or below this")
      ->capture_default_str();
  audc->footer(cli::capability_matrix());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (seed) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tolerance) cfg.tolerance = *tolerance;
    if (!unit.empty() && !config_path.empty() && unit != cfg.time_unit)
      throw InputError("time unit '" + unit + "' does not match the config's '" + cfg.time_unit +
                       "'");
    const fs::path dir(cfg.out_dir);

    if (*fig1) {
      write_file(dir, "fig1.csv", cli::fig1_csv(fig_tau, fig_ratio, fig_points));
    } else if (*acf) {
      write_file(dir, "acf.csv",
                 cli::acf_csv(acf_model, cli::parse_route(route), acf_step, acf_lags,
                              cfg.tolerance));
    } else if (*simc) {
      if (!cfg.seed) throw InputError("simulate requires --seed (or seed in the config)");
      sim.seed = *cfg.seed;
      const auto out = cli::simulate(sim);
      write_file(dir, "paths.csv", out.paths_csv);
      if (!out.acf_csv.empty()) write_file(dir, "acf.csv", out.acf_csv);
      write_file(dir, "summary.csv", out.summary_csv);
      std::cout << out.summary_csv;
    } else if (*estc) {
      if (detrend == "given") est.detrend = market::Detrend::GivenMu;
      else if (detrend != "sample-mean") throw InputError("--detrend must be sample-mean or given");
      const auto report = cli::estimate_prices(cli::parse_price_csv(read_file(prices_path)), est);
      const auto text = cli::report_csv(report);
      write_file(dir, "fit.csv", text);
      std::cout << text;
    } else if (*audc) {
      if (cfg.seed) aud.seed = *cfg.seed;
      const auto res = cli::audit(aud);
      write_file(dir, "audit.csv", res.table_csv);
      std::cout << (res.passed ? "audit passed" : "audit FAILED") << ", worst residual "
                << res.worst << "\n";
      if (!res.passed) return 4;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
