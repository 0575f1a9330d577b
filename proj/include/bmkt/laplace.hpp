#pragma once

#include <span>
#include <vector>

#include "bmkt/models.hpp"
#include "bmkt/series.hpp"

namespace bmkt::laplace {

struct InversionRequest {
  ShapeEvaluator shape;
  std::vector<double> lags;  ///< strictly increasing, first >= 0
  double accuracy_target = 1e-8;
  /// Also sum the conjugate half of the contour and report the imaginary
  /// residue; doubles the number of shape evaluations.
  bool check_symmetry = true;
};

struct InversionResult {
  std::vector<double> lags;
  std::vector<double> values;
  double max_imag_residue = 0.0;  ///< relative to the lag-0 value
  double error_estimate = 0.0;    ///< largest Euler-acceleration disagreement
};

/// Bromwich inversion of inversion_scale * shape(p) on the lag grid by the
/// Fourier-series method with Euler summation. Lags are independent and
/// evaluated in parallel.
InversionResult invert(const InversionRequest& request);

/// Single-threaded reference of invert(); results are bit-identical.
InversionResult invert_serial(const InversionRequest& request);

/// Normalized ACF of `shape` on t_k = k * step, k = 0..n-1.
AcfSeries invert_uniform(const ShapeEvaluator& shape, double step, std::size_t n,
                         double accuracy_target = 1e-8);

/// One lag of the inversion. `error_estimate` receives the acceleration
/// disagreement when non-null.
double invert_at(const ShapeEvaluator& shape, double t, double accuracy_target,
                 double* error_estimate = nullptr, double* imag_residue = nullptr,
                 bool check_symmetry = false);

struct SpectralDensity {
  std::vector<double> omega;
  std::vector<double> values;
};

/// Clamp for negative spectral values, relative to the zero-frequency peak.
inline constexpr double kNegativeDensityClamp = 1e-8;

/// S(omega) = 2 C~(0) Re shape(i omega). Tiny negatives are clamped to 0;
/// larger ones raise SpectralPositivityError.
double spectral_density(const ShapeEvaluator& shape, double omega);
SpectralDensity spectral_density(const ShapeEvaluator& shape, std::span<const double> omega);

}  // namespace bmkt::laplace
