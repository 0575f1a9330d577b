#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bmkt/models.hpp"
#include "bmkt/series.hpp"

namespace bmkt::volterra {

/// Lambda1(2t/tau_R)/tau_R^2, the self-similar market kernel.
KernelSeries rubin_kernel(double tau_R, double h, std::size_t n);

/// Lambda1(2t/tau_R)/(tau_r tau_R) with tau_R = theta tau_r. theta == 0
/// collapses to a delta kernel with local rate 1/tau_r.
KernelSeries stock_kernel(double tau_r, double theta, double h, std::size_t n);

/// Delta kernel with local rate 1/tau (white-noise force).
KernelSeries white_kernel(double tau, double h, std::size_t n);

/// Kernel for WhiteNoise, LinearSelfSimilar and StockTheta models.
KernelSeries model_kernel(const ModelSpec& model, double h, std::size_t n);

/// Solves c'(t) = -int_0^t K(t-s) c(s) ds, c(0) = 1, for `steps` steps with
/// trapezoidal product integration; returns steps + 1 values.
AcfSeries propagate_acf(const KernelSeries& kernel, std::size_t steps);

/// Same equation with K(t) = c(t)/tau_corr^2 built from the solution itself.
/// Requires h <= tau_corr / 50.
AcfSeries propagate_self_consistent(double tau_corr, std::size_t steps, double h);

/// Time-domain ACF of the Boltzmann and Differential models. Both satisfy
///   t c = c*c + a (t c)*c + b c*c*c
/// (Boltzmann a = -1/tau_R, b = 0; Differential a = 0, b = 1/tau_R), whose
/// one free parameter c(h) is fixed by matching the Laplace image at
/// p = 4/tau_R. Requires h <= tau_R / 10.
AcfSeries propagate_closure(const ModelSpec& model, double h, std::size_t steps);

/// Dispatches to the routine matching the model; Scaling and Fractional
/// have no time-domain route.
AcfSeries model_acf(const ModelSpec& model, double h, std::size_t steps);

/// Integrates dR/dt = -int_0^t K(t-s) R(s) ds + F(t) with the memory term
/// in trapezoidal form. The force enters as h * F_n over step n for kernels
/// with a delta component (white noise) and as h (F_n + F_{n+1}) / 2 for
/// smooth kernels. The path has the noise's length. The memory integral
/// reaches back at most the kernel's length.
std::vector<double> integrate_gle(const KernelSeries& kernel, std::span<const double> noise,
                                  double r0, double h);

/// Paths are independent; integrated in parallel. Output label ReturnRate.
PathEnsemble integrate_gle_ensemble(const KernelSeries& kernel, const PathEnsemble& noise,
                                    std::span<const double> r0);

/// Single-threaded reference of integrate_gle_ensemble().
PathEnsemble integrate_gle_ensemble_serial(const KernelSeries& kernel, const PathEnsemble& noise,
                                           std::span<const double> r0);

}  // namespace bmkt::volterra
