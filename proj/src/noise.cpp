#include "bmkt/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>

#include "bmkt/errors.hpp"

namespace bmkt::noise {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate(const NoiseRequest& req) {
  if (!is_power_of_two(req.n_steps)) throw InputError("noise: n_steps must be a power of two");
  if (!(req.h > 0.0) || !std::isfinite(req.h)) throw InputError("noise: h must be > 0");
  if (req.n_paths == 0) throw InputError("noise: n_paths must be >= 1");
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer make_buffer(std::size_t n) {
  return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

// Forward DFT plan of size m; planning is not thread-safe, so every plan is
// made here on the calling thread and executed with fftw_execute_dft.
struct Plan {
  fftw_plan plan = nullptr;
  explicit Plan(std::size_t m) {
    auto in = make_buffer(m);
    auto out = make_buffer(m);
    plan = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  ~Plan() {
    if (plan) fftw_destroy_plan(plan);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

std::vector<double> eigen_from_covariance(const CovarianceTarget& target, std::size_t m) {
  auto buf = make_buffer(m);
  auto out = make_buffer(m);
  const std::size_t half = m / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    const double c = target.covariance(k);
    buf[k][0] = c;
    buf[k][1] = 0.0;
    if (k > 0 && k < half) {
      buf[m - k][0] = c;
      buf[m - k][1] = 0.0;
    }
  }
  Plan plan(m);
  fftw_execute_dft(plan.plan, buf.get(), out.get());
  std::vector<double> eig(m);
  for (std::size_t j = 0; j < m; ++j) eig[j] = out[j][0];
  return eig;
}

std::vector<double> eigen_from_spectrum(const SpectrumTarget& target, std::size_t m, double h) {
  std::vector<double> eig(m);
  const double period = 2.0 * std::numbers::pi / h;
  for (std::size_t j = 0; j <= m / 2; ++j) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / (static_cast<double>(m) * h);
    double s = target.density(w);
    if (target.band_limit <= 0.0 || target.band_limit > 0.5 * period) {
      // Fold aliases until they stop contributing.
      for (int a = 1; a <= 4096; ++a) {
        const double add = target.density(w + a * period) + target.density(std::abs(w - a * period));
        s += add;
        if (std::abs(add) <= 1e-16 * std::abs(s)) break;
      }
    }
    eig[j] = s / h;
    if (j > 0 && j < m / 2) eig[m - j] = eig[j];
  }
  return eig;
}

// Clamps small negatives; returns the worst relative eigenvalue.
double clamp_eigenvalues(std::vector<double>& eig) {
  const double top = *std::max_element(eig.begin(), eig.end());
  double worst = 0.0;
  for (double& v : eig) {
    if (v < 0.0) {
      worst = std::min(worst, v / top);
      if (v >= -kEigenvalueClamp * top) v = 0.0;
    }
  }
  return worst;
}

void draw_path(const std::vector<double>& sqrt_eig, const Plan& plan, std::uint64_t seed,
               std::size_t index, std::span<double> out) {
  const std::size_t m = sqrt_eig.size();
  auto buf = make_buffer(m);
  auto res = make_buffer(m);
  auto eng = path_engine(seed, kColoredStream, index);
  std::normal_distribution<double> normal;
  for (std::size_t j = 0; j < m; ++j) {
    const double re = normal(eng);
    const double im = normal(eng);
    buf[j][0] = sqrt_eig[j] * re;
    buf[j][1] = sqrt_eig[j] * im;
  }
  fftw_execute_dft(plan.plan, buf.get(), res.get());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = res[k][0];
}

PathEnsemble colored(const NoiseRequest& req, bool parallel) {
  const auto eig = embedding_eigenvalues(req);
  const std::size_t m = eig.size();
  std::vector<double> sqrt_eig(m);
  for (std::size_t j = 0; j < m; ++j)
    sqrt_eig[j] = std::sqrt(std::max(eig[j], 0.0) / static_cast<double>(m));
  const Plan plan(m);
  PathEnsemble out(req.n_paths, req.n_steps, req.h, PathLabel::Force, req.seed, "colored");
  const auto count = static_cast<std::ptrdiff_t>(req.n_paths);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      draw_path(sqrt_eig, plan, req.seed, idx, out.path(idx));
    }
  } else {
    for (std::size_t i = 0; i < req.n_paths; ++i) draw_path(sqrt_eig, plan, req.seed, i, out.path(i));
  }
  return out;
}

}  // namespace

CovarianceTarget covariance_from(std::vector<double> values) {
  return CovarianceTarget{[v = std::move(values)](std::size_t k) { return k < v.size() ? v[k] : 0.0; }};
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint32_t tag, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), tag,
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> embedding_eigenvalues(const NoiseRequest& req) {
  validate(req);
  if (const auto* spec = std::get_if<SpectrumTarget>(&req.target)) {
    auto eig = eigen_from_spectrum(*spec, 2 * req.n_steps, req.h);
    const double worst = clamp_eigenvalues(eig);
    if (worst < -kEigenvalueClamp)
      throw SpectralPositivityError(
          "noise: target spectrum is negative; worst relative eigenvalue " + std::to_string(worst),
          worst);
    return eig;
  }
  const auto& cov = std::get<CovarianceTarget>(req.target);
  double worst = 0.0;
  for (std::size_t m = 2 * req.n_steps, tries = 0; tries < 4; m *= 2, ++tries) {
    auto eig = eigen_from_covariance(cov, m);
    worst = clamp_eigenvalues(eig);
    if (worst >= -kEigenvalueClamp) return eig;
  }
  throw SpectralPositivityError(
      "noise: circulant embedding indefinite; worst relative eigenvalue " + std::to_string(worst),
      worst);
}

PathEnsemble generate_colored(const NoiseRequest& request) { return colored(request, true); }

PathEnsemble generate_colored_serial(const NoiseRequest& request) {
  return colored(request, false);
}

PathEnsemble generate_wiener_increments(std::size_t n_steps, double h, std::size_t n_paths,
                                        std::uint64_t seed) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("wiener increments: h must be > 0");
  if (n_paths == 0) throw InputError("wiener increments: n_paths must be >= 1");
  PathEnsemble out(n_paths, n_steps, h, PathLabel::Increment, seed, "wiener");
  const double sd = std::sqrt(h);
  const auto count = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    auto eng = path_engine(seed, kWienerStream, idx);
    std::normal_distribution<double> normal(0.0, sd);
    for (double& v : out.path(idx)) v = normal(eng);
  }
  return out;
}

std::vector<double> initial_values(std::size_t n_paths, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0)) throw DomainError("initial_values: variance must be >= 0");
  std::vector<double> r0(n_paths);
  const double sd = std::sqrt(variance);
  for (std::size_t i = 0; i < n_paths; ++i) {
    auto eng = path_engine(seed, kInitialStream, i);
    std::normal_distribution<double> normal(0.0, sd);
    r0[i] = normal(eng);
  }
  return r0;
}

}  // namespace bmkt::noise
