#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bmkt/commands.hpp"
#include "bmkt/config.hpp"
#include "bmkt/errors.hpp"
#include "bmkt/specfun.hpp"

namespace fs = std::filesystem;
using namespace bmkt;

namespace {

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bmkt_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BMKT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round trip") {
  const std::string text =
      "time_unit=year\nseed=42\nout_dir=results\ntolerance=1e-09\npreset.market=linear\n";
  const auto cfg = RunConfig::parse(text);
  CHECK(cfg.time_unit == "year");
  CHECK(cfg.seed == 42u);
  CHECK(cfg.tolerance == 1e-9);
  CHECK(cfg.presets.at("market") == "linear");
  CHECK(cfg.serialize() == text);
  CHECK(RunConfig::parse(cfg.serialize()) == cfg);
  const auto loose = RunConfig::parse("# comment\n\n  tolerance = 0.001 \ntime_unit=day\n");
  CHECK(RunConfig::parse(loose.serialize()) == loose);
  CHECK(loose.serialize() == "time_unit=day\nout_dir=.\ntolerance=0.001\n");
}

TEST_CASE("config errors name the line") {
  try {
    RunConfig::parse("time_unit=year\nseed=abc\n");
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::parse("colour=blue\n"), InputError);
  CHECK_THROWS_AS(RunConfig::parse("tolerance=-1\n"), InputError);
  CHECK_THROWS_AS(RunConfig::parse("novalue\n"), InputError);
}

TEST_CASE("fig1 data") {
  const auto csv = cli::fig1_csv(1.0, 10.0, 10001);
  CHECK(csv.rfind("tau_over_tau_R,lambda1,lambda0\n0,1,1\n", 0) == 0);
  CHECK(csv.back() == '\n');
  const auto rows = parse_csv(csv);
  CHECK(rows.size() == 10001);
  auto first_zero = [&](int col) {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i - 1][col] > 0.0 && rows[i][col] <= 0.0) return rows[i][0];
    return -1.0;
  };
  CHECK(std::abs(first_zero(1) - 1.9158) < 2e-3);
  CHECK(std::abs(first_zero(2) - 2.4048) < 2e-3);
  CHECK_THROWS_AS(cli::fig1_csv(1.0, 10.0, 1), InputError);
}

TEST_CASE("acf routes and capabilities") {
  cli::ModelArgs lin;
  lin.model = "linear";
  lin.tau_R = 1.0;
  const auto closed = parse_csv(cli::acf_csv(lin, cli::Route::Closed, 0.05, 200, 1e-8));
  const auto lap = parse_csv(cli::acf_csv(lin, cli::Route::Laplace, 0.05, 200, 1e-8));
  double worst = 0.0;
  for (std::size_t k = 0; k < closed.size(); ++k) worst = std::max(worst, std::abs(closed[k][1] - lap[k][1]));
  CHECK(worst <= 1e-4);

  cli::ModelArgs boltz;
  boltz.model = "boltzmann";
  const auto b = parse_csv(cli::acf_csv(boltz, cli::Route::Volterra, 0.01, 100, 1e-8));
  CHECK(b[0][1] == 1.0);

  cli::ModelArgs stock;
  stock.model = "stock";
  stock.theta = 1.5;
  CHECK_NOTHROW(cli::acf_csv(stock, cli::Route::Laplace, 0.1, 50, 1e-8));
  try {
    cli::acf_csv(stock, cli::Route::Closed, 0.1, 50, 1e-8);
    FAIL("expected capability error");
  } catch (const CapabilityError& e) {
    CHECK(std::string(e.what()).find("capabilities") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::acf_csv(boltz, cli::Route::Laplace, 0.1, 5, 1e-8), CapabilityError);
  CHECK_THROWS_AS(cli::parse_route("fourier"), InputError);
}

TEST_CASE("price CSV parsing") {
  const auto a = cli::parse_price_csv("t,price\n0,100\n0.5,101\n1.0,99\n");
  CHECK(a.prices.size() == 3);
  CHECK(a.step == 0.5);
  const auto b = cli::parse_price_csv("price\n1\n2\n");
  CHECK_FALSE(b.step.has_value());
  try {
    cli::parse_price_csv("price\n1\n2\nx\n");
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_price_csv("value\n1\n"), InputError);
  CHECK_THROWS_AS(cli::parse_price_csv("t,price\n0,1\n1,2\n3,4\n"), InputError);
}

TEST_CASE("estimate from prices") {
  cli::PriceSeries flat;
  flat.prices.assign(400, 10.0);
  CHECK_THROWS_AS(cli::estimate_prices(flat, {1.0}), InputError);
  cli::PriceSeries growth;
  for (int k = 0; k < 400; ++k) growth.prices.push_back(std::exp(0.01 * k));
  CHECK_THROWS_AS(cli::estimate_prices(growth, {1.0}), InputError);
  cli::EstimateArgs no_step;
  CHECK_THROWS_AS(cli::estimate_prices(growth, no_step), InputError);
}

TEST_CASE("simulate is deterministic and GBM without volatility is exponential") {
  cli::SimulateArgs s;
  s.model.model = "linear";
  s.n_paths = 3;
  s.n_steps = 256;
  s.h = 0.05;
  s.seed = 9;
  s.max_lag = 20;
  const auto a = cli::simulate(s);
  const auto b = cli::simulate(s);
  CHECK(a.paths_csv == b.paths_csv);
  CHECK(a.acf_csv == b.acf_csv);
  CHECK(a.summary_csv.find("seed,9\n") != std::string::npos);

  cli::SimulateArgs g;
  g.model.model = "gbm";
  g.n_paths = 1;
  g.n_steps = 100;
  g.h = 0.01;
  g.mu = 0.05;
  g.M0 = 100.0;
  const auto rows = parse_csv(cli::simulate(g).paths_csv);
  for (const auto& r : rows) CHECK(std::abs(r[1] / (100.0 * std::exp(0.05 * r[0])) - 1.0) < 1e-12);
  g.model.model = "boltzmann";
  CHECK_THROWS_AS(cli::simulate(g), CapabilityError);
}

TEST_CASE("audit tables") {
  for (const char* m : {"white", "linear", "stock", "boltzmann", "differential", "scaling"}) {
    cli::AuditArgs a;
    a.model.model = m;
    a.model.theta = 1.4;
    const auto r = cli::audit(a);
    CHECK_MESSAGE(r.passed, m);
    CHECK(r.table_csv.rfind("check,p_re,p_im,residual,status\n", 0) == 0);
  }
  cli::AuditArgs strict;
  strict.model.model = "differential";
  strict.max_fd_residual = 1e-14;
  CHECK_FALSE(cli::audit(strict).passed);
}

TEST_CASE("command-line exit codes and outputs") {
  const auto dir = scratch_dir("exit");
  const std::string out = " --out-dir " + dir.string();
  CHECK(run_cli(out + " fig1 --points 11") == 0);
  CHECK(slurp(dir / "fig1.csv").rfind("tau_over_tau_R,lambda1,lambda0\n0,1,1\n", 0) == 0);
  CHECK(run_cli(out + " acf --model stock --theta 1.5 --route closed") == 3);
  CHECK(run_cli(out + " acf --model linear --route volterra --step 0.5") == 2);
  CHECK(run_cli(out + " simulate --model white --paths 2 --steps 64") == 2);  // no seed
  CHECK(run_cli(out + " --seed 4 simulate --model white --paths 2 --steps 64 --step 0.1 --max-lag 8") == 0);
  CHECK(run_cli(out + " audit --model linear") == 0);
  CHECK(run_cli(out + " audit --model differential --max-residual 1e-30") == 4);
  CHECK(run_cli(out + " estimate " + (dir / "missing.csv").string() + " --step 1") == 2);
  CHECK(run_cli(out + " nonsense") == 2);

  std::ofstream(dir / "cfg.txt") << "time_unit=year\nseed=5\n";
  CHECK(run_cli(out + " --config " + (dir / "cfg.txt").string() + " --unit day fig1") == 2);
  CHECK(run_cli(out + " --config " + (dir / "cfg.txt").string() +
                " simulate --model white --paths 1 --steps 64 --step 0.1 --max-lag 4") == 0);
  CHECK(slurp(dir / "summary.csv").find("seed,5\n") != std::string::npos);
}
