#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bmkt/errors.hpp"
#include "bmkt/laplace.hpp"
#include "bmkt/noise.hpp"
#include "bmkt/specfun.hpp"

using namespace bmkt;

namespace {

struct LagStat {
  double mean;
  double se;
};

// Mean over paths of the per-path lag-k product average, with its standard error.
LagStat lag_product(const PathEnsemble& e, std::size_t k) {
  std::vector<double> per;
  for (std::size_t i = 0; i < e.n_paths(); ++i) {
    const auto p = e.path(i);
    double s = 0.0;
    for (std::size_t n = 0; n + k < p.size(); ++n) s += p[n] * p[n + k];
    per.push_back(s / static_cast<double>(p.size() - k));
  }
  double m = 0.0, v = 0.0;
  for (double x : per) m += x;
  m /= per.size();
  for (double x : per) v += (x - m) * (x - m);
  return {m, std::sqrt(v / (per.size() - 1.0) / per.size())};
}

}  // namespace

TEST_CASE("covariance target: exponential covariance is reproduced") {
  const double h = 0.1, tau = 0.7;
  noise::NoiseRequest req{noise::CovarianceTarget{[&](std::size_t k) { return std::exp(-static_cast<double>(k) * h / tau); }},
                          4096, h, 64, 2024};
  const auto e = noise::generate_colored(req);
  CHECK(e.label() == PathLabel::Force);
  for (std::size_t k : {0u, 1u, 3u, 10u}) {
    const auto s = lag_product(e, k);
    CHECK(std::abs(s.mean - std::exp(-static_cast<double>(k) * h / tau)) < 4.0 * s.se + 1e-3);
  }
}

TEST_CASE("spectrum target: semicircle noise has a Lambda1 covariance") {
  const double h = 0.1, tau = 1.0;
  const auto shape = ShapeEvaluator::force(ModelSpec::linear(tau));
  noise::SpectrumTarget target{[shape](double w) { return laplace::spectral_density(shape, w); },
                               2.0 / tau};
  noise::NoiseRequest req{target, 4096, h, 64, 7};
  const auto eig = noise::embedding_eigenvalues(req);
  // The embedding's own covariance: inverse DFT of the eigenvalues.
  const std::size_t m = eig.size();
  for (std::size_t k : {0u, 1u, 5u, 20u}) {
    double c = 0.0;
    for (std::size_t j = 0; j < m; ++j) c += eig[j] * std::cos(2.0 * std::numbers::pi * j * k / m);
    c /= static_cast<double>(m);
    CHECK(std::abs(c - specfun::lambda1(2.0 * k * h / tau)) < 1e-4);
  }
  const auto e = noise::generate_colored(req);
  for (std::size_t k : {0u, 5u, 20u}) {
    const auto s = lag_product(e, k);
    CHECK(std::abs(s.mean - specfun::lambda1(2.0 * k * h / tau)) < 4.0 * s.se + 1e-3);
  }
}

TEST_CASE("embedding eigenvalues match a direct DFT") {
  const std::vector<double> c = {1.0, 0.5, 0.1};
  noise::NoiseRequest req{noise::covariance_from(c), 8, 1.0, 1, 0};
  const auto eig = noise::embedding_eigenvalues(req);
  REQUIRE(eig.size() == 16);
  for (std::size_t j = 0; j < eig.size(); ++j) {
    const double w = 2.0 * std::numbers::pi * j / 16.0;
    CHECK(std::abs(eig[j] - (1.0 + 2.0 * 0.5 * std::cos(w) + 2.0 * 0.1 * std::cos(2.0 * w))) < 1e-12);
  }
}

TEST_CASE("indefinite targets are rejected") {
  noise::NoiseRequest req{noise::covariance_from({1.0, 1.5}), 8, 1.0, 1, 0};
  CHECK_THROWS_AS(noise::embedding_eigenvalues(req), SpectralPositivityError);
  try {
    noise::embedding_eigenvalues(req);
  } catch (const SpectralPositivityError& e) {
    CHECK(e.worst() < -0.1);
  }
}

TEST_CASE("requests are validated") {
  CHECK_THROWS_AS(noise::generate_colored({noise::covariance_from({1.0}), 100, 0.1, 1, 0}), InputError);
  CHECK_THROWS_AS(noise::generate_colored({noise::covariance_from({1.0}), 128, 0.0, 1, 0}), InputError);
  CHECK_THROWS_AS(noise::generate_colored({noise::covariance_from({1.0}), 128, 0.1, 0, 0}), InputError);
}

TEST_CASE("seeding: deterministic, per-path streams, serial equals parallel") {
  const auto target = noise::covariance_from({1.0, 0.3});
  const auto a = noise::generate_colored({target, 256, 0.1, 4, 11});
  const auto b = noise::generate_colored({target, 256, 0.1, 4, 11});
  const auto c = noise::generate_colored_serial({target, 256, 0.1, 4, 11});
  const auto wide = noise::generate_colored({target, 256, 0.1, 10, 11});
  const auto other = noise::generate_colored({target, 256, 0.1, 4, 12});
  CHECK(a.data() == b.data());
  CHECK(a.data() == c.data());
  for (std::size_t i = 0; i < 4; ++i) {
    const auto pa = a.path(i), pw = wide.path(i);
    CHECK(std::equal(pa.begin(), pa.end(), pw.begin()));
  }
  CHECK(a.data() != other.data());
  CHECK(a.seed() == 11);
}

TEST_CASE("white increments and initial values") {
  const double h = 0.25;
  const auto dw = noise::generate_wiener_increments(4096, h, 16, 3);
  CHECK(dw.label() == PathLabel::Increment);
  double s = 0.0;
  for (double x : dw.data()) s += x * x;
  s /= static_cast<double>(dw.data().size());
  CHECK(std::abs(s - h) < 4.0 * h * std::sqrt(2.0 / dw.data().size()));
  const auto r0 = noise::initial_values(20000, 4.0, 3);
  double v = 0.0;
  for (double x : r0) v += x * x;
  CHECK(std::abs(v / r0.size() - 4.0) < 4.0 * 4.0 * std::sqrt(2.0 / r0.size()));
  CHECK(noise::initial_values(5, 1.0, 3) == noise::initial_values(5, 1.0, 3));
}
