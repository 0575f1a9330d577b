#include <doctest.h>

#include <cmath>

#include "bmkt/errors.hpp"
#include "bmkt/noise.hpp"
#include "bmkt/specfun.hpp"
#include "bmkt/volterra.hpp"

using namespace bmkt;

namespace {

double max_dev_lambda1(const AcfSeries& acf, double tau) {
  double worst = 0.0;
  for (std::size_t k = 0; k < acf.size(); ++k)
    worst = std::max(worst, std::abs(acf.values[k] - specfun::lambda1(2.0 * acf.lag(k) / tau)));
  return worst;
}

// Trapezoid-rule Laplace transform of a sampled ACF.
double laplace_of(const AcfSeries& acf, double p) {
  double s = 0.5 * acf.values[0];
  for (std::size_t k = 1; k < acf.size(); ++k)
    s += acf.values[k] * std::exp(-p * acf.lag(k)) * (k + 1 == acf.size() ? 0.5 : 1.0);
  return s * acf.step;
}

}  // namespace

TEST_CASE("delta kernel reproduces the trapezoid recursion exactly") {
  const double tau = 1.3, h = 0.02;
  const auto acf = volterra::propagate_acf(volterra::white_kernel(tau, h, 10), 500);
  const double a = (1.0 - 0.5 * h / tau) / (1.0 + 0.5 * h / tau);
  for (std::size_t k = 0; k < acf.size(); ++k) {
    CHECK(std::abs(acf.values[k] - std::pow(a, static_cast<double>(k))) < 1e-13);
    CHECK(std::abs(acf.values[k] - std::exp(-acf.lag(k) / tau)) < 1e-4);
  }
}

TEST_CASE("self-similar kernel gives Lambda1 with second-order error") {
  const double tau = 1.0;
  const auto coarse = volterra::propagate_acf(volterra::rubin_kernel(tau, 0.02, 501), 500);
  const auto fine = volterra::propagate_acf(volterra::rubin_kernel(tau, 0.01, 1001), 1000);
  const double e1 = max_dev_lambda1(coarse, tau), e2 = max_dev_lambda1(fine, tau);
  CHECK(e1 < 2e-4);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("self-consistent solve reproduces Lambda1") {
  const double tau = 2.0;
  const auto acf = volterra::propagate_self_consistent(tau, 2000, tau / 200.0);
  CHECK(acf.size() == 2001);
  CHECK(max_dev_lambda1(acf, tau) < 1e-4);
  CHECK_THROWS_AS(volterra::propagate_self_consistent(tau, 10, tau / 10.0), DomainError);
}

TEST_CASE("stock kernels: theta = 2 gives J0, theta = 0 gives an exponential") {
  const double h = 0.01;
  const auto j0 = volterra::propagate_acf(volterra::stock_kernel(1.0, 2.0, h, 1001), 1000);
  for (std::size_t k = 0; k < j0.size(); k += 10)
    CHECK(std::abs(j0.values[k] - specfun::bessel_j0(j0.lag(k))) < 1e-4);
  const auto k0 = volterra::stock_kernel(1.0, 0.0, h, 5);
  CHECK(k0.local_rate == 1.0);
  CHECK(k0.values == std::vector<double>(5, 0.0));
}

TEST_CASE("closure route matches the Laplace images") {
  for (const auto& m : {ModelSpec::boltzmann(1.0), ModelSpec::differential(1.0)}) {
    const double h = 0.005;
    const auto acf = volterra::propagate_closure(m, h, 8000);
    CHECK(acf.values[0] == 1.0);
    for (double p : {0.5, 1.0, 2.0, 8.0}) {
      const double expected = m.tau_R * observable_shape(m, p).real();
      CHECK(std::abs(laplace_of(acf, p) - expected) < 2e-3 * expected);
    }
  }
  CHECK_THROWS_AS(volterra::propagate_closure(ModelSpec::linear(1.0), 0.01, 10), CapabilityError);
  CHECK_THROWS_AS(volterra::propagate_closure(ModelSpec::boltzmann(1.0), 0.2, 10), DomainError);
}

TEST_CASE("model_acf dispatch") {
  CHECK(volterra::model_acf(ModelSpec::white_noise(1.0), 0.1, 20).size() == 21);
  CHECK(volterra::model_acf(ModelSpec::linear(1.0), 0.01, 20).values[0] == 1.0);
  CHECK_THROWS_AS(volterra::model_acf(ModelSpec::stock(Variant::Scaling, 1.0, 1.0), 0.01, 20),
                  CapabilityError);
  CHECK_THROWS_AS(volterra::model_kernel(ModelSpec::boltzmann(1.0), 0.01, 20), CapabilityError);
}

TEST_CASE("horizon beyond the kernel is rejected") {
  CHECK_THROWS_AS(volterra::propagate_acf(volterra::rubin_kernel(1.0, 0.01, 50), 100), InputError);
}

TEST_CASE("GLE without force is r0 times the propagated ACF") {
  const auto kernel = volterra::rubin_kernel(1.0, 0.02, 400);
  const std::vector<double> zero(400, 0.0);
  const auto path = volterra::integrate_gle(kernel, zero, 2.5, 0.02);
  const auto acf = volterra::propagate_acf(kernel, 399);
  for (std::size_t k = 0; k < path.size(); ++k) CHECK(path[k] == doctest::Approx(2.5 * acf.values[k]));
  CHECK_THROWS_AS(volterra::integrate_gle(kernel, zero, 1.0, 0.03), InputError);
}

TEST_CASE("GLE ensemble: parallel equals serial") {
  const double h = 0.05;
  noise::NoiseRequest req{noise::covariance_from({1.0, 0.5, 0.1}), 256, h, 12, 99};
  const auto force = noise::generate_colored(req);
  const auto kernel = volterra::rubin_kernel(1.0, h, 100);
  const auto r0 = noise::initial_values(12, 1.0, 99);
  const auto a = volterra::integrate_gle_ensemble(kernel, force, r0);
  const auto b = volterra::integrate_gle_ensemble_serial(kernel, force, r0);
  CHECK(a.data() == b.data());
  CHECK(a.label() == PathLabel::ReturnRate);
  CHECK(a.seed() == 99);
  const std::vector<double> short_r0(3, 0.0);
  CHECK_THROWS_AS(volterra::integrate_gle_ensemble(kernel, force, short_r0), InputError);
}
