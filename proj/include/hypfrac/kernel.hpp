#pragma once

#include <vector>

namespace hypfrac::kernel {

// One summand c * rho^p * sinh^{-k}(rho) * cosh^j(rho) * K_{nu0+m}(a rho),
// with p = -nu0 - rho_shift.
struct BesselTerm {
    double coefficient;
    int order_shift;  // m
    int sinh_power;   // k
    int cosh_power;   // j
    int rho_shift;
};

// A value represented as mantissa * exp(log_scale).
struct Scaled {
    double mantissa;
    double log_scale;
    double value() const;
    double log_abs() const;
};

struct BesselTermSum {
    double nu0 = 0.5;
    double a = 1.0;
    std::vector<BesselTerm> terms;

    // rho^{-nu} K_nu(a rho)
    static BesselTermSum base(double nu, double a);

    double rho_power(const BesselTerm& t) const { return -nu0 - t.rho_shift; }
    int max_order_shift() const;
    Scaled evaluate_scaled(double rho) const;
    double evaluate(double rho) const;
};

// One application of (-d/drho) / sinh(rho), with like terms merged.
BesselTermSum apply_operator(const BesselTermSum& t);
BesselTermSum apply_operator(const BesselTermSum& t, int times);

// C(N,s), including the two Gamma((N+2s)/2) factors exactly as printed (they cancel).
double normalizing_constant(int N, double s);

// nu0 = (1+2s)/2, a = (N-1)/2
BesselTermSum kernel_terms(int N, double s);

double kernel_odd(int N, double s, double rho, bool* underflow = nullptr);
double kernel_even(int N, double s, double rho, double tol = 1e-13, bool* underflow = nullptr);
double kernel(int N, double s, double rho, bool* underflow = nullptr);

// log K_s(rho), free of underflow at large rho.
double kernel_log(int N, double s, double rho);

// lim rho^{N+2s} K_s(rho)
double near_field_amplitude(int N, double s);

struct AsymptoticFit {
    double near_exponent;  // least-squares slope of log K vs log rho on [1e-4, 1e-2]
    double far_rate;       // decay rate from log K + (1+s) log rho = c0 - rate rho + c1/rho on [10, 30]
};
AsymptoticFit fit_asymptotics(int N, double s);

struct KernelTable {
    int dim;
    double order;
    std::vector<double> rho_grid;
    std::vector<double> values;
    double near_exponent;
    double far_rate;
};

// Log-spaced table; throws TableRejected if monotonicity or the asymptotic bands fail.
KernelTable build_kernel_table(int N, double s, double rho_min, double rho_max, int count);

// Fast evaluation of phi(rho) = log K_s(rho) + (N-1) rho through cubic interpolation
// on a grid uniform in xi = rho + log rho; analytic extrapolation outside [1e-6, 60].
class KernelInterpolant {
public:
    KernelInterpolant(int N, double s, double step = 0.03);
    double phi(double rho) const;
    double log_kernel(double rho) const { return phi(rho) - (N_ - 1) * rho; }
    int dim() const { return N_; }
    double order() const { return s_; }

private:
    int N_;
    double s_;
    double xi0_, dxi_;
    std::vector<double> phi_;
    double rho_lo_, rho_hi_;
    double near_slope_;
    double far_c_[4];
};

}  // namespace hypfrac::kernel
