#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <variant>

#include "bmkt/series.hpp"

namespace bmkt::noise {

/// Autocovariance at lag index k (lag k * h), force units.
struct CovarianceTarget {
  std::function<double(std::size_t)> covariance;
};

/// Two-sided continuous spectral density S(omega), units force^2 * time.
/// Samples of the process then have the DTFT sum_m S(omega + 2 pi m / h) / h.
struct SpectrumTarget {
  std::function<double(double)> density;
  /// Support half-width; 0 means unbounded (aliases are summed).
  double band_limit = 0.0;
};

struct NoiseRequest {
  std::variant<CovarianceTarget, SpectrumTarget> target;
  std::size_t n_steps = 0;  ///< power of two
  double h = 0.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
};

/// Covariance target from a finite sequence; lags beyond it are zero.
CovarianceTarget covariance_from(std::vector<double> values);

/// Stream tags used in the seed lineage of generated ensembles.
inline constexpr std::uint32_t kColoredStream = 0x636f6c6fu;
inline constexpr std::uint32_t kWienerStream = 0x7769656eu;
inline constexpr std::uint32_t kInitialStream = 0x696e6974u;

/// Engine for path `index` of the stream `tag` under `seed`: an mt19937_64
/// seeded through std::seed_seq{seed_lo, seed_hi, tag, index}.
std::mt19937_64 path_engine(std::uint64_t seed, std::uint32_t tag, std::size_t index);

/// Clamp applied to negative circulant eigenvalues, relative to the largest.
inline constexpr double kEigenvalueClamp = 1e-8;

/// Circulant-embedding eigenvalues for a request (length 2^k >= 2 n_steps).
/// Throws SpectralPositivityError naming the worst eigenvalue if the
/// embedding stays indefinite after three doublings.
std::vector<double> embedding_eigenvalues(const NoiseRequest& request);

/// Stationary Gaussian paths with the requested covariance, n_paths x
/// n_steps, generated in parallel over paths.
PathEnsemble generate_colored(const NoiseRequest& request);

/// Single-threaded reference of generate_colored(); bit-identical output.
PathEnsemble generate_colored_serial(const NoiseRequest& request);

/// i.i.d. N(0, h) increments, n_paths x n_steps.
PathEnsemble generate_wiener_increments(std::size_t n_steps, double h, std::size_t n_paths,
                                        std::uint64_t seed);

/// i.i.d. N(0, variance) draws, one per path, from the initial-value stream.
std::vector<double> initial_values(std::size_t n_paths, double variance, std::uint64_t seed);

}  // namespace bmkt::noise
