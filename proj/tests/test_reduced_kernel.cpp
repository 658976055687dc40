#include "test_main.hpp"

#include "hypfrac/errors.hpp"
#include "hypfrac/geometry.hpp"
#include "hypfrac/quadrature.hpp"
#include "hypfrac/reduced_kernel.hpp"

#include <cmath>
#include <numbers>

namespace hk = hypfrac::kernel;
namespace geo = hypfrac::geometry;
using hypfrac::quad::gauss_legendre;

namespace {

bool rel_close(double a, double b, double tol) { return std::fabs(a / b - 1.0) < tol; }

// Brute-force sphere integral in ball coordinates using the geodesic distance directly.
double brute_W(int N, double s, double r1, double r2) {
    const double pi = std::numbers::pi;
    const double t1 = std::tanh(r1 / 2), t2 = std::tanh(r2 / 2);
    auto gl = gauss_legendre(48);
    auto gl2 = gauss_legendre(12);
    double acc = 0.0;
    geo::BallPoint x(N, 0.0);
    x[0] = t1;
    for (int i = 0; i < 48; ++i) {
        const double th = 0.5 * pi * (gl.nodes[i] + 1), wth = 0.5 * pi * gl.weights[i];
        if (N == 3) {
            // the azimuth is a symmetry direction but is still sampled
            for (int j = 0; j < 12; ++j) {
                const double ph = pi * (gl2.nodes[j] + 1), wph = pi * gl2.weights[j];
                geo::BallPoint y{t2 * std::cos(th), t2 * std::sin(th) * std::cos(ph), t2 * std::sin(th) * std::sin(ph)};
                acc += wth * wph * std::sin(th) * hk::kernel(N, s, geo::geodesic_distance(x, y));
            }
        } else {
            for (int j = 0; j < 12; ++j) {
                const double ph = 0.5 * pi * (gl2.nodes[j] + 1), wph = 0.5 * pi * gl2.weights[j];
                for (int k = 0; k < 12; ++k) {
                    const double ps = pi * (gl2.nodes[k] + 1), wps = pi * gl2.weights[k];
                    geo::BallPoint y{t2 * std::cos(th), t2 * std::sin(th) * std::cos(ph),
                                     t2 * std::sin(th) * std::sin(ph) * std::cos(ps),
                                     t2 * std::sin(th) * std::sin(ph) * std::sin(ps)};
                    acc += wth * wph * wps * std::sin(th) * std::sin(th) * std::sin(ph) *
                           hk::kernel(N, s, geo::geodesic_distance(x, y));
                }
            }
        }
    }
    return geo::sphere_area(N - 1) * std::pow(std::sinh(r1), N - 1) * std::pow(std::sinh(r2), N - 1) * acc;
}

}  // namespace

TEST_CASE("closed form and angular route agree for N = 3") {
    hk::PairKernel pk(3, 0.5);
    for (double r1 : {1e-3, 0.05, 0.7, 3.0, 12.0})
        for (double r2 : {2e-3, 0.051, 0.8, 1.0, 5.0, 19.9, 400.0, 1e6}) {
            if (r1 == r2) continue;
            CHECK(rel_close(pk.W_angular(r1, r2), pk.W_closed_form(r1, r2), 1e-6));
        }
}

TEST_CASE("angular reduction matches brute-force sphere quadrature") {
    CHECK(rel_close(hk::PairKernel(3, 0.5).W(0.5, 2.0), brute_W(3, 0.5, 0.5, 2.0), 1e-6));
    CHECK(rel_close(hk::PairKernel(4, 0.25).W(0.7, 1.9), brute_W(4, 0.25, 0.7, 1.9), 1e-6));
}

TEST_CASE("reduced kernel matrix structure") {
    std::vector<double> g{0.0, 0.1, 0.2, 0.35, 0.6, 1.0, 1.6, 2.5, 4.0};
    for (int N : {2, 3, 4}) {
        hk::ReducedKernel rk = hk::build_reduced_kernel(N, 0.5, g);
        CHECK((rk.W - rk.W.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (std::size_t i = 1; i < g.size(); ++i)
            for (std::size_t j = 1; j < g.size(); ++j)
                if (i != j) CHECK(rk.W(i, j) > 0.0);
        CHECK(rk.W.row(0).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(hk::build_reduced_kernel(3, 0.5, {0.0, 0.5, 0.4}), hypfrac::DomainError);
}

TEST_CASE("W decreases with separation for well-separated radii") {
    for (int N : {3, 4}) {
        hk::PairKernel pk(N, 0.5);
        const double r1 = 1.0;
        double prev = pk.W(r1, 1.5);
        for (double r2 = 2.0; r2 <= 15.0; r2 += 0.5) {
            const double w = pk.W(r1, r2);
            CHECK(w < prev);
            prev = w;
        }
        prev = pk.W(r1, 0.5);
        for (double r2 = 0.45; r2 > 0.01; r2 -= 0.05) {
            const double w = pk.W(r1, r2);
            CHECK(w < prev);
            prev = w;
        }
    }
}

TEST_CASE("near-diagonal power law") {
    for (int N : {2, 3, 5})
        for (double s : {0.25, 0.5, 0.75}) {
            hk::PairKernel pk(N, s);
            // adjacent-node pairs at a typical grid step
            for (double r : {0.05, 0.5, 2.0, 10.0}) {
                const double h = 0.05 * std::min(r, 1.0);
                CHECK(std::fabs(pk.W(r, r + h) / pk.model()(r, r + h) - 1.0) < 0.1);
            }
            // fitted exponent on a refined local grid
            const double r = 2.0;
            const double d1 = 1e-4, d2 = 1e-2;
            const double slope = std::log(pk.W(r, r + d2) / pk.W(r, r + d1)) / std::log(d2 / d1);
            CHECK(std::fabs(-slope / (1 + 2 * s) - 1.0) < 0.1);
        }
}

TEST_CASE("tail integral beyond R") {
    const double R = 6.0;
    hk::PairKernel closed(3, 0.5), angular(3, 0.5, false);
    for (double r1 : {0.3, 3.0, 5.9}) {
        const double a = closed.tail(r1, R), b = angular.tail(r1, R, 1e-8);
        CHECK(rel_close(a, b, 1e-5));
        // truncated direct integration plus the algebraic remainder bounds the tail from below
        const double part = hypfrac::quad::integrate_adaptive([&](double r2) { return closed.W(r1, r2); }, R, R + 40,
                                                              1e-10 * a);
        CHECK(part < a);
        CHECK(part > 0.3 * a);
    }
    hk::PairKernel p4(4, 0.75);
    CHECK(p4.tail(2.0, R) > 0.0);
}
