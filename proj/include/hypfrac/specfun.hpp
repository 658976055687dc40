#pragma once

#include <vector>

namespace hypfrac::specfun {

// K_nu(x), x > 0. Throws OverflowError when the value is not representable
// (tiny x, large nu); use bessel_k_log there.
double bessel_k(double nu, double x);

// log K_nu(x), valid wherever K_nu(x) is positive, including overflow and underflow ranges.
double bessel_k_log(double nu, double x);

// e^x K_nu(x)
double bessel_k_scaled(double nu, double x);

// log(e^x K_nu(x)); exact cancellation of the exponential for large x.
double bessel_k_log_scaled(double nu, double x);

// K_{nu0+m}(x) for m = 0..count-1 as values[m] * exp(log_scale).
// One Temme evaluation plus upward recurrence, rescaled against overflow.
struct BesselSequence {
    std::vector<double> values;
    double log_scale = 0.0;
};
BesselSequence bessel_k_sequence(double nu0, int count, double x);

// Large-x asymptotic series of log K_nu(x) (Hankel expansion, optimally truncated).
double bessel_k_log_asymptotic(double nu, double x);

// Taylor coefficients of 1/Gamma(1+z) about z = 0, exposed for testing.
double reciprocal_gamma_series(double z);

}  // namespace hypfrac::specfun
