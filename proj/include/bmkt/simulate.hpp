#pragma once

#include <cstddef>
#include <cstdint>

#include "bmkt/models.hpp"
#include "bmkt/series.hpp"

namespace bmkt::simulate {

struct GleRun {
  double h = 0.0;
  std::size_t n_steps = 0;  ///< kept samples per path
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  /// Leading samples discarded; default 5 correlation times.
  std::size_t burn_in = static_cast<std::size_t>(-1);
  /// Memory kernel length in steps; 0 picks 64 market times.
  std::size_t kernel_points = 0;
};

/// Return-rate paths of the GLE for WhiteNoise, LinearSelfSimilar and
/// StockTheta models: colored force from the model's force spectrum (white
/// for delta kernels), r0 drawn independently from N(0, variance), memory
/// integral over the kernel. Other variants throw CapabilityError.
PathEnsemble gle_returns(const ModelSpec& model, const GleRun& run);

/// Same ensemble with every stage in its single-threaded reference form.
PathEnsemble gle_returns_serial(const ModelSpec& model, const GleRun& run);

}  // namespace bmkt::simulate
