#include "test_main.hpp"

#include "hypfrac/fd_reference.hpp"
#include "hypfrac/errors.hpp"
#include "hypfrac/kernel.hpp"

#include <cmath>
#include <random>

namespace hk = hypfrac::kernel;
using hypfrac::DomainError;
using hypfrac::TableRejected;
namespace specfun = hypfrac::specfun;
using namespace hypfrac::kernel;

namespace {
bool rel_close(double a, double b, double tol) { return std::fabs(a / b - 1.0) < tol; }
}  // namespace

TEST_CASE("normalizing constant") {
    // 40-digit Gamma-product values
    CHECK(rel_close(normalizing_constant(3, 0.5), 0.05066059182116888572, 1e-14));
    CHECK(rel_close(normalizing_constant(2, 0.5), 0.06349363593424096979, 1e-14));
    for (int N = 2; N <= 6; ++N)
        for (double s = 0.1; s < 0.95; s += 0.1) {
            const double c = normalizing_constant(N, s);
            CHECK(c > 0.0);
            CHECK(std::isfinite(c));
            CHECK(std::fabs(normalizing_constant(N, s + 1e-6) - c) < 1e-4 * c);
        }
    CHECK_THROWS_AS(normalizing_constant(3, 0.0), DomainError);
    CHECK_THROWS_AS(normalizing_constant(3, 1.0), DomainError);
}

TEST_CASE("one application of the operator to the base term") {
    const double nu = 0.75, a = 1.5;
    BesselTermSum t = apply_operator(BesselTermSum::base(nu, a));
    REQUIRE(t.terms.size() == 1);
    CHECK(t.terms[0].sinh_power == 1);
    CHECK(t.terms[0].order_shift == 1);
    CHECK(t.terms[0].cosh_power == 0);
    CHECK(t.rho_power(t.terms[0]) == doctest::Approx(-nu));
    CHECK(t.terms[0].coefficient == doctest::Approx(a));
    const double r = 0.8;
    CHECK(rel_close(t.evaluate(r), a * std::pow(r, -nu) * specfun::bessel_k(nu + 1, a * r) / std::sinh(r), 1e-14));
}

TEST_CASE("operator matches finite differences and composes") {
    BesselTermSum t = apply_operator(BesselTermSum::base(0.6, 2.0), 2);
    BesselTermSum t3 = apply_operator(t);
    CHECK(t3.terms.size() == apply_operator(BesselTermSum::base(0.6, 2.0), 3).terms.size());
    const double h = 1e-5;
    for (double r : {0.2, 0.9, 3.0, 7.5}) {
        const double fd = -(t.evaluate(r + h) - t.evaluate(r - h)) / (2 * h) / std::sinh(r);
        CHECK(rel_close(t3.evaluate(r), fd, 1e-6));
        CHECK(rel_close(apply_operator(apply_operator(t)).evaluate(r),
                        apply_operator(t, 2).evaluate(r), 1e-14));
    }
}

TEST_CASE("golden kernel values from extended-precision oracles") {
    CHECK(rel_close(kernel_odd(3, 0.5, 1.0), 0.07004358118773639887, 1e-12));
    CHECK(rel_close(kernel_odd(5, 0.5, 1.0), 0.03209060795923796779, 1e-12));
    CHECK(rel_close(kernel_odd(5, 0.25, 0.3), 18.54763812118044013664, 1e-12));
    CHECK(rel_close(kernel_even(2, 0.5, 1.0), 0.1304645534354930790578, 1e-11));
    CHECK(rel_close(kernel_even(4, 0.75, 0.7), 0.5265313386396411814575, 1e-11));
}

TEST_CASE("odd kernel agrees with nested finite differences") {
    for (int N : {3, 5})
        for (double s : {0.25, 0.5, 0.75})
            for (double r = 0.1; r <= 10.0; r *= 1.35)
                CHECK(rel_close(kernel_odd(N, s, r), hypfrac::fd_reference::kernel_odd_fd(N, s, r), 1e-6));
}

TEST_CASE("dispatch, positivity and strict decrease") {
    CHECK(hk::kernel(3, 0.5, 0.7) == kernel_odd(3, 0.5, 0.7));
    CHECK(hk::kernel(4, 0.5, 0.7) == kernel_even(4, 0.5, 0.7));
    for (int N = 2; N <= 5; ++N)
        for (double s : {0.25, 0.5, 0.75}) {
            double prev = hk::kernel(N, s, 1e-3);
            CHECK(prev > 0);
            for (double r = 1.1e-3; r <= 20.0; r *= 1.1) {
                const double v = hk::kernel(N, s, r);
                CHECK(v > 0);
                CHECK(v < prev);
                prev = v;
            }
        }
    CHECK_THROWS_AS(hk::kernel(3, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(kernel_odd(4, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(kernel_even(3, 0.5, 1.0), DomainError);
}

TEST_CASE("near-field amplitude") {
    for (int N = 2; N <= 6; ++N)
        for (double s : {0.25, 0.5, 0.75}) {
            const double r = 1e-5;
            CHECK(rel_close(hk::kernel(N, s, r) * std::pow(r, N + 2 * s), near_field_amplitude(N, s), 1e-4));
        }
}

TEST_CASE("far field and underflow") {
    for (int N : {2, 4}) {
        double lo = 1e300, hi = -1e300;
        for (double r = 10; r <= 30; r += 1) {
            const double v = kernel_log(N, 0.5, r) + (N - 1) * r + 1.5 * std::log(r);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo < 0.2);
    }
    bool uf = false;
    CHECK(hk::kernel(5, 0.5, 200.0, &uf) == 0.0);
    CHECK(uf);
    CHECK(std::isfinite(kernel_log(5, 0.5, 200.0)));
    hk::kernel(3, 0.5, 1.0, &uf);
    CHECK_FALSE(uf);
}

TEST_CASE("even kernel refinement consistency") {
    for (double r : {0.01, 1.0, 12.0}) {
        const double a = kernel_even(2, 0.5, r, 1e-8), b = kernel_even(2, 0.5, r, 5e-9);
        CHECK(std::fabs(a - b) < 10 * 1e-8 * a);
    }
}

TEST_CASE("kernel table") {
    KernelTable t = build_kernel_table(3, 0.5, 1e-4, 30, 400);
    CHECK(t.rho_grid.size() == 400);
    CHECK(std::fabs(t.near_exponent + 4.0) < 0.05);
    CHECK(std::fabs(t.far_rate / 2.0 - 1.0) < 0.01);
    for (std::size_t i = 1; i < t.values.size(); ++i) CHECK(t.values[i] < t.values[i - 1]);
    CHECK_THROWS_AS(build_kernel_table(3, 0.5, 1e-4, 30, 8), DomainError);
    CHECK_THROWS_AS(build_kernel_table(3, 0.5, 0.0, 30, 100), DomainError);
}

TEST_CASE("interpolant reproduces the kernel") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(std::log(1e-7), std::log(90.0));
    for (int N : {3, 4}) {
        KernelInterpolant ki(N, 0.5);
        double worst = 0;
        for (int i = 0; i < 400; ++i) {
            const double r = std::exp(u(rng));
            worst = std::max(worst, std::fabs(ki.log_kernel(r) - kernel_log(N, 0.5, r)));
        }
        CHECK(worst < 1e-6);
    }
}
