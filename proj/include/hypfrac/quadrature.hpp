#pragma once

#include <functional>
#include <vector>

namespace hypfrac::quad {

using Integrand = std::function<double(double)>;
// Receives (t, t - lower) so that endpoint singularities can use the exact offset.
using OffsetIntegrand = std::function<double(double, double)>;

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// n-point Gauss-Jacobi rule on [-1, 1] for weight (1-x)^alpha (1+x)^beta.
Rule gauss_jacobi(int n, double alpha, double beta);

// Gauss-Jacobi rule mapped to [0, 1] for weight t^beta (1-t)^alpha.
Rule gauss_jacobi_unit(int n, double alpha, double beta);

struct SemiInfiniteOptions {
    double scale = 1.0;          // characteristic width of the integrand near `lower`
    bool sqrt_endpoint = false;  // substitute t = lower + v^2 (inverse square-root endpoint)
    bool relative = false;       // interpret tol relative to |result|
    int max_levels = 12;
};

// Exp-sinh double-exponential rule on [lower, inf) with step halving.
// Throws QuadratureError (carrying the last estimate) if tol is not reached.
double integrate_semi_infinite(const Integrand& f, double lower, double tol,
                               const SemiInfiniteOptions& opt = {});
double integrate_semi_infinite(const OffsetIntegrand& f, double lower, double tol,
                               const SemiInfiniteOptions& opt = {});

// Adaptive Gauss-Kronrod (7,15) bisection on [a, b], recursion depth at most 30.
double integrate_adaptive(const Integrand& f, double a, double b, double tol);

}  // namespace hypfrac::quad
