#include "hypfrac/reduced_kernel.hpp"
#include "hypfrac/errors.hpp"
#include "hypfrac/geometry.hpp"
#include "hypfrac/parallel.hpp"
#include "hypfrac/quadrature.hpp"
#include "hypfrac/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hypfrac::kernel {

namespace {

constexpr double kPi = std::numbers::pi;

const quad::Rule& gl16() {
    static const quad::Rule r = quad::gauss_legendre(16);
    return r;
}

// log sinh(r) - r, accurate for all r > 0
double log_sinh_minus(double r) {
    if (r > 20.0) return -std::numbers::ln2 + std::log1p(-std::exp(-2.0 * r));
    return std::log(-std::expm1(-2.0 * r)) - std::numbers::ln2;
}

}  // namespace

double DiagonalModel::c(double r1, double r2) const {
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    return amplitude * std::exp(0.5 * (dim - 1) * (geometry::log_sinh(r1) + geometry::log_sinh(r2)));
}

double DiagonalModel::operator()(double r1, double r2) const {
    return c(r1, r2) * std::pow(std::fabs(r1 - r2), -exponent);
}

DiagonalModel diagonal_model(int N, double s) {
    // int_0^inf t^{N-2} (1+t^2)^{-(N+2s)/2} dt
    const double B = std::tgamma((N - 1) / 2.0) * std::tgamma((1.0 + 2.0 * s) / 2.0) / (2.0 * std::tgamma((N + 2.0 * s) / 2.0));
    DiagonalModel m;
    m.dim = N;
    m.exponent = 1.0 + 2.0 * s;
    m.amplitude = geometry::sphere_area(N - 1) * geometry::sphere_area(N - 2) * near_field_amplitude(N, s) * B;
    return m;
}

PairKernel::PairKernel(int N, double s, bool closed_form)
    : N_(N), s_(s), closed_(closed_form && N == 3), model_(diagonal_model(N, s)) {
    if (N < 2) throw DomainError("reduced kernel requires N >= 2");
    interp_ = std::make_shared<KernelInterpolant>(N, s);
}

double PairKernel::W_closed_form(double r1, double r2) const {
    if (N_ != 3) throw DomainError("closed-form reduced kernel exists only for N = 3");
    if (r1 > r2) std::swap(r1, r2);
    if (r1 <= 0.0) return 0.0;
    if (r1 == r2) throw DomainError("W is singular on the diagonal");
    // W = 8 pi^2 C sinh r1 sinh r2 [k(r2-r1) - k(r1+r2)],  k(x) = x^{-nu} K_nu(x)
    const double nu = 0.5 + s_;
    const double d1 = r2 - r1, d2 = r1 + r2;
    const double lsr = log_sinh_minus(r2);
    // log of sinh(r2) k(d1) with the e^{r2} growth cancelled against e^{-d1}
    const double l1 = lsr + r1 - nu * std::log(d1) + specfun::bessel_k_log_scaled(nu, d1);
    const double l2 = lsr - r1 - nu * std::log(d2) + specfun::bessel_k_log_scaled(nu, d2);
    const double diff = -std::expm1(l2 - l1);
    return 8.0 * kPi * kPi * normalizing_constant(3, s_) * std::sinh(r1) * std::exp(l1) * diff;
}

double PairKernel::W_angular(double r1, double r2) const {
    if (r1 > r2) std::swap(r1, r2);
    if (r1 <= 0.0) return 0.0;
    if (r1 == r2) throw DomainError("W is singular on the diagonal");
    const int N = N_;
    const double delta = r2 - r1;
    const bool far = r2 > 300.0;
    if (far && delta < 50.0) throw DomainError("reduced kernel: both radii beyond 300 are not supported");
    const double sh1 = std::sinh(r1);
    const double shd = std::sinh(0.5 * delta);
    const double prod = far ? 0.0 : sh1 * std::sinh(r2);
    // e(theta) = d - r2; integrand K(d) e^{(N-1) r2} sin^{N-2} theta = exp(phi(d) - (N-1) e) sin^{N-2}
    auto f = [&](double th) {
        double d, e;
        if (far) {
            const double sn = std::sin(0.5 * th);
            e = std::log(std::exp(-r1) + 2.0 * sh1 * sn * sn);
            d = r2 + e;
        } else {
            const double sn = std::sin(0.5 * th);
            d = 2.0 * std::asinh(std::sqrt(shd * shd + prod * sn * sn));
            e = d - r2;
        }
        const double v = std::exp(interp_->phi(d) - (N - 1) * e);
        return N == 2 ? v : v * std::pow(std::sin(th), N - 2);
    };
    // angular scale of the peak at theta = 0
    const double width = far ? std::sqrt(2.0 * std::exp(-r1) / sh1) : delta / std::sqrt(std::max(prod, 1e-300));
    double lo = 0.0, hi = std::min(width, kPi);
    const quad::Rule& g = gl16();
    double sum = 0.0;
    while (true) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int i = 0; i < 16; ++i) sum += g.weights[i] * h * f(c + h * g.nodes[i]);
        if (hi >= kPi) break;
        lo = hi;
        hi = std::min(2.0 * hi, kPi);
    }
    const double pref = geometry::sphere_area(N - 1) * geometry::sphere_area(N - 2);
    const double lw = (N - 1) * (geometry::log_sinh(r1) + log_sinh_minus(r2));
    return pref * std::exp(lw) * sum;
}

double PairKernel::W(double r1, double r2) const {
    return closed_ ? W_closed_form(r1, r2) : W_angular(r1, r2);
}

double PairKernel::tail(double r1, double R, double rel_tol) const {
    if (!(r1 < R)) throw DomainError("tail requires r1 < R");
    if (r1 <= 0.0) return 0.0;
    quad::SemiInfiniteOptions opt;
    opt.scale = std::min(std::max(R - r1, 1e-8), 1.0);
    opt.relative = true;
    opt.max_levels = 14;
    return quad::integrate_semi_infinite([&](double r2) { return W(r1, r2); }, R, rel_tol, opt);
}

ReducedKernel build_reduced_kernel(const PairKernel& pk, const std::vector<double>& r_grid) {
    const std::size_t n = r_grid.size();
    if (n < 2) throw DomainError("reduced kernel needs at least two radii");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(r_grid[i] >= 0.0) || (i > 0 && !(r_grid[i] > r_grid[i - 1])))
            throw DomainError("reduced kernel grid must be nonnegative and strictly increasing");
    }
    ReducedKernel rk;
    rk.dim = pk.dim();
    rk.order = pk.order();
    rk.r_grid = r_grid;
    rk.diagonal_model = pk.model();
    rk.W = Eigen::MatrixXd::Zero(n, n);
    rk.ratio = Eigen::MatrixXd::Identity(n, n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w;
            try {
                w = pk.W(r_grid[i], r_grid[j]);
            } catch (const std::exception& e) {
                throw QuadratureError("reduced kernel failed at (r1, r2) = (" + std::to_string(r_grid[i]) + ", " +
                                          std::to_string(r_grid[j]) + "): " + e.what(),
                                      0.0);
            }
            if (!std::isfinite(w) || w < 0.0)
                throw QuadratureError("reduced kernel not finite/positive at (" + std::to_string(r_grid[i]) + ", " +
                                          std::to_string(r_grid[j]) + ")",
                                      0.0);
            rk.W(i, j) = w;
            const double m = pk.model()(r_grid[i], r_grid[j]);
            rk.ratio(i, j) = m > 0.0 ? w / m : 0.0;
        }
    });
    // mirror the upper triangle so symmetry is exact
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            rk.W(j, i) = rk.W(i, j);
            rk.ratio(j, i) = rk.ratio(i, j);
        }
    return rk;
}

ReducedKernel build_reduced_kernel(int N, double s, const std::vector<double>& r_grid) {
    return build_reduced_kernel(PairKernel(N, s), r_grid);
}

}  // namespace hypfrac::kernel
