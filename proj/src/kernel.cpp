#include "hypfrac/kernel.hpp"
#include "hypfrac/errors.hpp"
#include "hypfrac/geometry.hpp"
#include "hypfrac/quadrature.hpp"
#include "hypfrac/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

namespace hypfrac::kernel {

namespace {

constexpr double kUnderflow = 1e-300;

void check_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order s must lie in (0,1), got " + std::to_string(s));
}

void check_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("kernel requires rho > 0, got " + std::to_string(rho));
}

double log_cosh(double r) {
    r = std::fabs(r);
    return r + std::log1p(std::exp(-2.0 * r)) - std::numbers::ln2;
}

// Term sums are pure functions of (N, s, applications); memoize them.
const BesselTermSum& cached_terms(int N, double s, int times) {
    static std::mutex mtx;
    static std::map<std::tuple<int, double, int>, BesselTermSum> cache;
    std::lock_guard<std::mutex> lk(mtx);
    auto key = std::make_tuple(N, s, times);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, apply_operator(kernel_terms(N, s), times)).first;
    return it->second;
}

}  // namespace

double Scaled::value() const { return mantissa * std::exp(log_scale); }
double Scaled::log_abs() const { return std::log(std::fabs(mantissa)) + log_scale; }

BesselTermSum BesselTermSum::base(double nu, double a) {
    if (!(a > 0.0)) throw DomainError("Bessel argument scale must be positive");
    BesselTermSum t;
    t.nu0 = nu;
    t.a = a;
    t.terms.push_back({1.0, 0, 0, 0, 0});
    return t;
}

int BesselTermSum::max_order_shift() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.order_shift);
    return m;
}

Scaled BesselTermSum::evaluate_scaled(double rho) const {
    check_rho(rho);
    const int M = max_order_shift();
    if (M >= 64 || terms.size() > 256) throw DomainError("term sum exceeds evaluation buffers");
    specfun::BesselSequence seq = specfun::bessel_k_sequence(nu0, M + 1, a * rho);
    double logk[64];
    for (int m = 0; m <= M; ++m) logk[m] = std::log(seq.values[m]);
    const double lr = std::log(rho), ls = geometry::log_sinh(rho), lc = log_cosh(rho);
    double lmax = -std::numeric_limits<double>::infinity();
    double lt[256];
    const std::size_t n = terms.size();
    for (std::size_t i = 0; i < n; ++i) {
        const BesselTerm& t = terms[i];
        lt[i] = std::log(std::fabs(t.coefficient)) + rho_power(t) * lr - t.sinh_power * ls + t.cosh_power * lc +
                logk[t.order_shift];
        lmax = std::max(lmax, lt[i]);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::exp(lt[i] - lmax);
        sum += terms[i].coefficient > 0 ? v : -v;
    }
    return {sum, lmax + seq.log_scale};
}

double BesselTermSum::evaluate(double rho) const { return evaluate_scaled(rho).value(); }

BesselTermSum apply_operator(const BesselTermSum& in) {
    // key: (m, k, j, q)
    std::map<std::tuple<int, int, int, int>, double> acc;
    auto add = [&](int m, int k, int j, int q, double c) {
        if (c != 0.0) acc[{m, k, j, q}] += c;
    };
    for (const BesselTerm& t : in.terms) {
        const double c = t.coefficient;
        const int m = t.order_shift, k = t.sinh_power, j = t.cosh_power, q = t.rho_shift;
        // d/drho of rho^p K_mu(a rho) = (p + mu) rho^{p-1} K_mu - a rho^p K_{mu+1}, with p + mu = m - q
        add(m, k, j, q + 1, c * (m - q));
        add(m + 1, k, j, q, -c * in.a);
        add(m, k + 1, j + 1, q, -c * k);  // d sinh^{-k} = -k sinh^{-k-1} cosh
        if (j > 0) add(m, k - 1, j - 1, q, c * j);  // d cosh^j = j cosh^{j-1} sinh
    }
    BesselTermSum out;
    out.nu0 = in.nu0;
    out.a = in.a;
    for (const auto& [key, c] : acc) {
        if (c == 0.0) continue;
        auto [m, k, j, q] = key;
        // multiply by -1/sinh
        out.terms.push_back({-c, m, k + 1, j, q});
    }
    if (out.terms.size() > 250) throw DomainError("term sum too large");
    return out;
}

BesselTermSum apply_operator(const BesselTermSum& t, int times) {
    BesselTermSum r = t;
    for (int i = 0; i < times; ++i) r = apply_operator(r);
    return r;
}

double normalizing_constant(int N, double s) {
    check_order(s);
    if (N < 2) throw DomainError("normalizing constant requires N >= 2");
    const double pi = std::numbers::pi;
    const double g = std::tgamma((N + 2.0 * s) / 2.0);
    const double first = std::sqrt(pi) * std::pow(2.0, 2.0 * s) * g /
                         (2.0 * std::tgamma(1.5) * std::pow(pi, N / 2.0) * std::fabs(std::tgamma(-s)));
    const double second = 1.0 / (std::pow(2.0, (N - 2.0 + 2.0 * s) / 2.0) * g);
    return first * second * std::pow((N - 1) / 2.0, (1.0 + 2.0 * s) / 2.0);
}

BesselTermSum kernel_terms(int N, double s) {
    check_order(s);
    return BesselTermSum::base((1.0 + 2.0 * s) / 2.0, (N - 1) / 2.0);
}

namespace {

double finish(double logv, bool* underflow) {
    if (underflow) *underflow = false;
    if (logv < std::log(kUnderflow)) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    return std::exp(logv);
}

double log_odd(int N, double s, double rho) {
    const Scaled v = cached_terms(N, s, (N - 1) / 2).evaluate_scaled(rho);
    if (!(v.mantissa > 0.0)) throw DomainError("odd kernel term sum lost positivity at rho = " + std::to_string(rho));
    return std::log(normalizing_constant(N, s)) + v.log_abs();
}

double log_even(int N, double s, double rho, double tol) {
    const BesselTermSum& G = cached_terms(N, s, N / 2);
    const Scaled g0 = G.evaluate_scaled(rho);
    const double E0 = g0.log_scale;
    const double sh = std::sinh(0.5 * rho);
    // u^2 = cosh r - cosh rho  <=>  r = 2 asinh(sqrt(sinh^2(rho/2) + u^2/2))
    auto integrand = [&](double u) {
        const double w = std::hypot(sh, u * std::numbers::sqrt2 * 0.5);
        double r = 2.0 * std::asinh(w);
        if (r <= rho) r = rho;  // guards rounding at u -> 0
        const Scaled v = G.evaluate_scaled(r);
        const double e = v.log_scale - E0;
        if (e < -745.0) return 0.0;
        return v.mantissa * std::exp(e);
    };
    quad::SemiInfiniteOptions opt;
    opt.scale = std::numbers::sqrt2 * sh;
    opt.relative = true;
    const double I = quad::integrate_semi_infinite(integrand, 0.0, tol, opt);
    if (!(I > 0.0)) throw DomainError("even kernel integral is not positive at rho = " + std::to_string(rho));
    return std::log(2.0 * normalizing_constant(N, s) / std::sqrt(std::numbers::pi)) + std::log(I) + E0;
}

}  // namespace

double kernel_odd(int N, double s, double rho, bool* underflow) {
    check_order(s);
    check_rho(rho);
    if (N < 3 || N % 2 == 0) throw DomainError("kernel_odd requires odd N >= 3");
    return finish(log_odd(N, s, rho), underflow);
}

double kernel_even(int N, double s, double rho, double tol, bool* underflow) {
    check_order(s);
    check_rho(rho);
    if (N < 2 || N % 2 != 0) throw DomainError("kernel_even requires even N >= 2");
    return finish(log_even(N, s, rho, tol), underflow);
}

double kernel(int N, double s, double rho, bool* underflow) {
    return N % 2 ? kernel_odd(N, s, rho, underflow) : kernel_even(N, s, rho, 1e-13, underflow);
}

double kernel_log(int N, double s, double rho) {
    check_order(s);
    check_rho(rho);
    if (N < 2) throw DomainError("kernel requires N >= 2");
    return N % 2 ? log_odd(N, s, rho) : log_even(N, s, rho, 1e-13);
}

double near_field_amplitude(int N, double s) {
    // G ~ g rho^{-q} near 0 after m applications, q = 2 nu + 2 m
    const double nu = (1.0 + 2.0 * s) / 2.0, a = (N - 1) / 2.0;
    const int m = N % 2 ? (N - 1) / 2 : N / 2;
    const double g = std::pow(2.0, nu - 1.0 + m) * std::pow(a, -nu) * std::tgamma(nu + m);
    const double C = normalizing_constant(N, s);
    if (N % 2) return C * g;
    const double q = 2.0 * nu + 2.0 * m;
    // (1/sqrt(pi)) int_rho^inf r (r^2-rho^2)^{-1/2} sqrt(2) r^{-q} dr
    return C * g * std::tgamma((q - 1.0) / 2.0) / (std::numbers::sqrt2 * std::tgamma(q / 2.0));
}

AsymptoticFit fit_asymptotics(int N, double s) {
    constexpr int n = 50;
    AsymptoticFit fit{};
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < n; ++i) {
            const double x = std::log(1e-4) + (std::log(1e-2) - std::log(1e-4)) * i / (n - 1);
            const double y = kernel_log(N, s, std::exp(x));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        fit.near_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    {
        Eigen::MatrixXd A(n, 3);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            const double r = 10.0 + 20.0 * i / (n - 1);
            A(i, 0) = 1.0;
            A(i, 1) = -r;
            A(i, 2) = 1.0 / r;
            y(i) = kernel_log(N, s, r) + (1.0 + s) * std::log(r);
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        fit.far_rate = c(1);
    }
    return fit;
}

KernelTable build_kernel_table(int N, double s, double rho_min, double rho_max, int count) {
    check_order(s);
    if (N < 2) throw DomainError("kernel table requires N >= 2");
    if (!(rho_min > 0.0 && rho_max > rho_min)) throw DomainError("kernel table requires 0 < rho_min < rho_max");
    if (count < 16) throw DomainError("kernel table requires at least 16 points");
    KernelTable t{N, s, {}, {}, 0.0, 0.0};
    t.rho_grid.resize(count);
    t.values.resize(count);
    for (int i = 0; i < count; ++i) {
        const double r = i == 0 ? rho_min : i == count - 1 ? rho_max
                                        : std::exp(std::log(rho_min) + (std::log(rho_max) - std::log(rho_min)) * i /
                                                                            (count - 1));
        t.rho_grid[i] = r;
        bool uf = false;
        t.values[i] = kernel(N, s, r, &uf);
        if (uf || !(t.values[i] > 0.0))
            throw TableRejected("kernel value not positive (underflow) at rho = " + std::to_string(r));
        if (i > 0 && !(t.values[i] < t.values[i - 1]))
            throw TableRejected("kernel not strictly decreasing at rho = " + std::to_string(r));
    }
    const AsymptoticFit f = fit_asymptotics(N, s);
    t.near_exponent = f.near_exponent;
    t.far_rate = f.far_rate;
    if (std::fabs(f.near_exponent + (N + 2.0 * s)) > 0.05)
        throw TableRejected("near-field exponent " + std::to_string(f.near_exponent) + " outside band");
    if (std::fabs(f.far_rate / (N - 1.0) - 1.0) > 0.01)
        throw TableRejected("far-field rate " + std::to_string(f.far_rate) + " outside band");
    return t;
}

namespace {

double xi_of(double rho) { return rho + std::log(rho); }

double rho_of(double xi) {
    // Newton on rho + log rho = xi, monotone and convex in log rho
    double lr = xi < 1.0 ? xi : std::log(xi);
    for (int it = 0; it < 100; ++it) {
        const double r = std::exp(lr);
        const double f = r + lr - xi;
        const double step = f / (r + 1.0);
        lr -= step;
        if (std::fabs(step) < 1e-15) break;
    }
    return std::exp(lr);
}

}  // namespace

KernelInterpolant::KernelInterpolant(int N, double s, double step) : N_(N), s_(s), dxi_(step) {
    check_order(s);
    rho_lo_ = 1e-6;
    rho_hi_ = 60.0;
    xi0_ = xi_of(rho_lo_);
    const int n = static_cast<int>(std::ceil((xi_of(rho_hi_) - xi0_) / dxi_)) + 1;
    phi_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = rho_of(xi0_ + i * dxi_);
        phi_[i] = kernel_log(N, s, r) + (N - 1) * r;
    }
    rho_hi_ = rho_of(xi0_ + (n - 1) * dxi_);
    near_slope_ = -(N + 2.0 * s);
    // far model phi = -(1+s) log rho + sum_k c_k rho^{-k}, interpolated at rho_hi * {1,2,4,8}
    Eigen::Matrix4d A;
    Eigen::Vector4d y;
    for (int i = 0; i < 4; ++i) {
        const double r = rho_hi_ * (1 << i);
        for (int k = 0; k < 4; ++k) A(i, k) = std::pow(r, -k);
        y(i) = kernel_log(N, s, r) + (N - 1) * r + (1.0 + s) * std::log(r);
    }
    Eigen::Vector4d c = A.fullPivLu().solve(y);
    for (int k = 0; k < 4; ++k) far_c_[k] = c(k);
}

double KernelInterpolant::phi(double rho) const {
    if (rho < rho_lo_) return phi_.front() + near_slope_ * std::log(rho / rho_lo_) + (N_ - 1) * (rho - rho_lo_);
    if (rho >= rho_hi_) {
        const double x = 1.0 / rho;
        return -(1.0 + s_) * std::log(rho) + far_c_[0] + x * (far_c_[1] + x * (far_c_[2] + x * far_c_[3]));
    }
    const double t = (xi_of(rho) - xi0_) / dxi_;
    int i = static_cast<int>(t);
    i = std::clamp(i, 1, static_cast<int>(phi_.size()) - 3);
    const double x = t - i;  // position relative to node i, nodes at -1,0,1,2
    const double p0 = phi_[i - 1], p1 = phi_[i], p2 = phi_[i + 1], p3 = phi_[i + 2];
    return -x * (x - 1) * (x - 2) / 6.0 * p0 + (x + 1) * (x - 1) * (x - 2) / 2.0 * p1 -
           (x + 1) * x * (x - 2) / 2.0 * p2 + (x + 1) * x * (x - 1) / 6.0 * p3;
}

}  // namespace hypfrac::kernel
