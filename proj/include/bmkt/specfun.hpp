#pragma once

// Real-argument special functions used by the model catalog: Bessel J0/J1,
// the normalized lambda functions, and both real branches of Lambert W.

namespace bmkt::specfun {

/// Largest |x| handled by the power series; Miller recurrence beyond.
inline constexpr double kBesselSeriesLimit = 8.0;

double bessel_j0(double x);
double bessel_j1(double x);

/// The two evaluation branches, exposed so the seam can be tested.
double bessel_j0_series(double x);
double bessel_j1_series(double x);
double bessel_j0_recurrence(double x);
double bessel_j1_recurrence(double x);

/// Lambda1(x) = 2 J1(x) / x with Lambda1(0) = 1.
double lambda1(double x);

/// Lambda0(x) = J0(x / 2): with this scaling Lambda0(2 t / tau_R) crosses
/// zero at t / tau_R = 2.4048...
double lambda0(double x);

/// Principal branch, x >= -1/e, result >= -1.
double lambert_w0(double x);

/// Lower branch, -1/e <= x < 0, result <= -1.
double lambert_wm1(double x);

/// W0(exp(z)) without forming exp(z); solves w + ln w = z.
double lambert_w0_of_exp(double z);

/// W_{-1}(-exp(a)) for a <= -1 without forming exp(a); solves w + ln(-w) = a.
double lambert_wm1_of_negexp(double a);

}  // namespace bmkt::specfun
