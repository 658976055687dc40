#include "test_main.hpp"

#include "hypfrac/errors.hpp"
#include "hypfrac/geometry.hpp"
#include "hypfrac/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace hypfrac;
using namespace hypfrac::geometry;

namespace {

BallPoint random_point(std::mt19937_64& rng, int n, double rmax = 0.95) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BallPoint x(n);
    double nn = 0;
    for (auto& c : x) {
        c = g(rng);
        nn += c * c;
    }
    const double r = rmax * std::pow(u(rng), 1.0 / n);
    for (auto& c : x) c *= r / std::sqrt(nn);
    return x;
}

double norm(const BallPoint& x) {
    double s = 0;
    for (double c : x) s += c * c;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("distance of coincident points is zero") {
    BallPoint x{0.3, -0.2, 0.1};
    CHECK(geodesic_distance(x, x) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("distance from origin to radius one half is log 3") {
    BallPoint o{0.0, 0.0, 0.0}, x{0.5, 0.0, 0.0};
    CHECK(std::fabs(geodesic_distance(o, x) - 1.0986122886681098) < 1e-14);
}

TEST_CASE("distance is symmetric, satisfies the triangle inequality, and is Mobius invariant") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 4;
        BallPoint x = random_point(rng, n), y = random_point(rng, n), z = random_point(rng, n);
        const double dxy = geodesic_distance(x, y);
        CHECK(dxy == doctest::Approx(geodesic_distance(y, x)).epsilon(1e-12));
        CHECK(dxy <= geodesic_distance(x, z) + geodesic_distance(z, y) + 1e-12);
        BallPoint a = random_point(rng, n, 0.8);
        const double moved = geodesic_distance(mobius_translate(a, x), mobius_translate(a, y));
        CHECK(std::fabs(moved - dxy) <= 1e-10 * std::max(1.0, dxy));
    }
}

TEST_CASE("Mobius translation sends a to the origin and fixes norms at a = 0") {
    BallPoint a{0.4, -0.3}, o{0.0, 0.0}, x{0.1, 0.6};
    BallPoint t = mobius_translate(a, a);
    CHECK(norm(t) < 1e-15);
    BallPoint m = mobius_translate(o, x);
    CHECK(norm(m) == doctest::Approx(norm(x)).epsilon(1e-15));
    CHECK(m[0] == doctest::Approx(-x[0]));
    CHECK(norm(mobius_translate(a, x)) < 1.0);
}

TEST_CASE("near-boundary points are rejected") {
    BallPoint bad{1.0 - 1e-13, 0.0};
    BallPoint ok{0.5, 0.0};
    CHECK_THROWS_AS(geodesic_distance(bad, ok), DomainError);
    CHECK_THROWS_AS(mobius_translate(ok, BallPoint{0.8, 0.7}), DomainError);
}

TEST_CASE("radial volume weight") {
    CHECK(radial_volume_weight(3, 0.0) == 0.0);
    CHECK(radial_volume_weight(3, 1.0) == doctest::Approx(4.0 * std::numbers::pi * std::pow(std::sinh(1.0), 2)));
    CHECK(radial_volume_weight(3, 1.0) == doctest::Approx(17.3551).epsilon(1e-4));
    CHECK(sphere_area(1) == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(sphere_area(2) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK_THROWS_AS(radial_volume_weight(1, 1.0), DomainError);
    for (int N = 2; N <= 6; ++N) {
        const double r = 30.0;
        const double ratio = radial_volume_weight(N, r) / std::exp((N - 1) * r);
        CHECK(std::fabs(ratio / (sphere_area(N - 1) / std::pow(2.0, N - 1)) - 1.0) < 1e-6);
    }
}

TEST_CASE("integrated radial weight equals ball volume from Euclidean coordinates") {
    // Brute force: vol B(0,R) = int_{|x|<tanh(R/2)} (2/(1-|x|^2))^N dx, computed with
    // a 2-D (polar angle x radius) tensor rule in ball coordinates for N = 3.
    const double R = 2.5;
    const double rho = std::tanh(R / 2.0);
    auto gl = quad::gauss_legendre(60);
    double brute = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double t = 0.5 * rho * (gl.nodes[i] + 1.0);
        for (int j = 0; j < 60; ++j) {
            const double th = 0.5 * std::numbers::pi * (gl.nodes[j] + 1.0);
            const double conf = std::pow(2.0 / (1.0 - t * t), 3);
            brute += gl.weights[i] * gl.weights[j] * 0.5 * rho * 0.5 * std::numbers::pi * conf * t * t *
                     std::sin(th) * 2.0 * std::numbers::pi;
        }
    }
    const double radial = quad::integrate_adaptive([](double r) { return radial_volume_weight(3, r); }, 0.0, R, 1e-13);
    CHECK(std::fabs(radial / brute - 1.0) < 1e-8);
}
