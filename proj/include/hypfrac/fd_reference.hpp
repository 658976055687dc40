#pragma once
// Independent reference for the odd-dimensional kernel: nested high-order central
// differences of rho^{-nu} K_nu(a rho), no term algebra involved.

#include "hypfrac/kernel.hpp"
#include "hypfrac/specfun.hpp"

#include <cmath>
#include <functional>

namespace hypfrac::fd_reference {

inline std::function<double(double)> apply_numeric(std::function<double(double)> f, double rel_step) {
    return [f, rel_step](double r) {
        // 8th-order central stencil
        static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
        const double h = rel_step * std::min(r, 1.0);
        double d = 0.0;
        for (int k = 1; k <= 4; ++k) d += c[k - 1] * (f(r + k * h) - f(r - k * h));
        return -(d / h) / std::sinh(r);
    };
}

inline double kernel_odd_fd(int N, double s, double rho) {
    const double nu = (1 + 2 * s) / 2, a = (N - 1) / 2.0;
    std::function<double(double)> f = [nu, a](double r) {
        return std::pow(r, -nu) * hypfrac::specfun::bessel_k(nu, a * r);
    };
    for (int i = 0; i < (N - 1) / 2; ++i) f = apply_numeric(f, 0.02);
    return hypfrac::kernel::normalizing_constant(N, s) * f(rho);
}

}  // namespace hypfrac::fd_reference
