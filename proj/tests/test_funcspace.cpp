#include "test_main.hpp"

#include "fs_fixtures.hpp"
#include "hypfrac/errors.hpp"
#include "hypfrac/geometry.hpp"
#include "hypfrac/quadrature.hpp"

#include <array>
#include <sstream>

using hypfrac::DomainError;
namespace hk = hypfrac::kernel;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// [u]_s^2 for the piecewise-linear u by direct double quadrature of the exact reduced kernel.
double brute_seminorm(const fs::RadialFunction& u, const hk::PairKernel& pk, double s) {
    const auto& x = u.grid->nodes;
    const double R = x.back();
    const auto gj = hypfrac::quad::gauss_jacobi_unit(30, 0.0, 1.0 - 2.0 * s);
    const auto gl = hypfrac::quad::gauss_legendre(40);
    auto inner = [&](std::size_t e, double r1) {
        const double u1 = u(r1);
        const double slope = (u.values[e + 1] - u.values[e]) / (x[e + 1] - x[e]);
        double acc = 0.0;
        // own element, split at r1: integrand slope^2 delta^{1-2s} (W delta^{1+2s})
        for (int side = 0; side < 2; ++side) {
            const double L = side == 0 ? r1 - x[e] : x[e + 1] - r1;
            const double sg = side == 0 ? -1.0 : 1.0;
            for (int i = 0; i < 30; ++i) {
                const double d = L * gj.nodes[i];
                acc += std::pow(L, 2.0 - 2.0 * s) * gj.weights[i] * slope * slope * pk.W(r1, r1 + sg * d) *
                       std::pow(d, 1.0 + 2.0 * s);
            }
        }
        for (std::size_t j = 0; j + 1 < x.size(); ++j) {
            if (j == e) continue;
            acc += hypfrac::quad::integrate_adaptive(
                [&](double r2) {
                    const double d = u1 - u(r2);
                    return d * d * pk.W(r1, r2);
                },
                x[j], x[j + 1], 1e-10);
        }
        return acc + 2.0 * u1 * u1 * pk.tail(r1, R, 1e-12);
    };
    double tot = 0.0;
    for (std::size_t e = 0; e + 1 < x.size(); ++e) {
        const double h = x[e + 1] - x[e];
        for (int i = 0; i < 40; ++i) tot += 0.5 * h * gl.weights[i] * inner(e, x[e] + 0.5 * h * (gl.nodes[i] + 1.0));
    }
    return tot;
}

}  // namespace

TEST_CASE("grid construction") {
    for (std::size_t n : {50u, 400u, 1001u}) {
        fs::GridOptions opt;
        opt.node_count = n;
        auto g = fs::make_grid(3, opt);
        REQUIRE(g.size() == n);
        CHECK(g.nodes.front() == 0.0);
        CHECK(g.nodes.back() == 20.0);
        for (std::size_t i = 1; i < n; ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
        for (double w : g.weights) CHECK(w > 0.0);
    }
    auto g = fs::make_grid(3, fs::GridOptions{});
    CHECK(g.nodes[1] == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(g.nodes[2] - g.nodes[1] == doctest::Approx(1.1e-3).epsilon(1e-9));
    // step sizes never decrease
    for (std::size_t i = 2; i < g.size(); ++i) CHECK(g.nodes[i] - g.nodes[i - 1] >= (g.nodes[i - 1] - g.nodes[i - 2]) * (1 - 1e-9));

    CHECK_THROWS_AS(fs::make_grid(3, std::vector<double>{0.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(fs::make_grid(3, std::vector<double>{0.1, 1.0, 2.0}), DomainError);
    CHECK(fs::make_grid(3, std::vector<double>{0.0, 1.0, 2.0}).hash() != fs::make_grid(4, std::vector<double>{0.0, 1.0, 2.0}).hash());
}

TEST_CASE("lumped weights integrate the volume element") {
    // total hyperbolic volume of the ball of radius 5 in H^3: pi (sinh 2R - 2R)
    fs::GridOptions opt;
    opt.R_max = 5.0;
    opt.node_count = 200;
    auto g = fs::make_grid(3, opt);
    double tot = 0.0;
    for (double w : g.weights) tot += w;
    const double pi = std::numbers::pi;
    CHECK(rel(tot, pi * (std::sinh(10.0) - 10.0)) < 1e-12);
}

TEST_CASE("mass and stiffness against direct quadrature") {
    const auto& st = setup(3, 0.5);
    const auto& g = *st.grid;
    // hat at node k: u^T M u = int phi_k^2 dV
    for (std::size_t k : {1u, 37u, 200u, 398u}) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(Eigen::Index(g.size()));
        v[Eigen::Index(k)] = 1.0;
        fs::RadialFunction hat(st.grid, v);
        auto phi = [&](double r) { return hat(r) * hat(r) * hypfrac::geometry::radial_volume_weight(3, r); };
        const double direct = hypfrac::quad::integrate_adaptive(phi, g.nodes[k - 1], g.nodes[k], 1e-14 * g.weights[k]) +
                              hypfrac::quad::integrate_adaptive(phi, g.nodes[k], g.nodes[k + 1], 1e-14 * g.weights[k]);
        CHECK(rel(fs::mass_form(hat, st.forms), direct) < 1e-10);
        // Dirichlet energy of the hat: sum over its two elements of slope^2 * volume
        auto grad2 = [&](double a, double b) {
            return hypfrac::quad::integrate_adaptive(
                [&](double r) { return hypfrac::geometry::radial_volume_weight(3, r) / ((b - a) * (b - a)); }, a, b,
                1e-14 * g.weights[k] / ((b - a) * (b - a)));
        };
        const double d = grad2(g.nodes[k - 1], g.nodes[k]) + grad2(g.nodes[k], g.nodes[k + 1]);
        CHECK(rel(fs::dirichlet_energy(hat, st.forms), d) < 1e-10);
    }
}

TEST_CASE("forms are symmetric, PSD and kill constants") {
    for (int N : {2, 3, 4}) {
        const auto& st = setup(N, 0.5, 120);
        const auto& f = st.forms;
        const auto n = Eigen::Index(st.grid->size());
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
        const double ks = f.stiffness.cwiseAbs().maxCoeff(), kn = f.nonlocal_interior.cwiseAbs().maxCoeff();
        CHECK((f.stiffness - f.stiffness.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((f.nonlocal - f.nonlocal.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::fabs(one.dot(f.stiffness * one)) < 1e-12 * ks * double(n));
        CHECK(std::fabs(one.dot(f.nonlocal_interior * one)) < 1e-12 * kn * double(n));
        CHECK((f.mass - f.mass.transpose()).cwiseAbs().maxCoeff() == 0.0);
        // PSD probe on the free nodes, scaled by the local volume so eigenvalues are O(1)
        Eigen::VectorXd sc = f.mass.diagonal().head(n - 1).cwiseSqrt().cwiseInverse();
        for (const Eigen::MatrixXd* m : {&f.stiffness, &f.nonlocal, &f.mass}) {
            Eigen::MatrixXd a = sc.asDiagonal() * m->topLeftCorner(n - 1, n - 1) * sc.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
            CHECK(es.eigenvalues()[0] >= -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("nonlocal form against brute-force double quadrature") {
    // coarse grid; the assembly error comes from interpolating W/model and is O(h^2)
    double err[2][3];
    int i = 0;
    for (std::size_t n : {40u, 80u}) {
        fs::GridOptions opt;
        opt.R_max = 5.0;
        opt.node_count = n;
        opt.h_min = 0.01 * 40.0 / double(n);
        opt.growth = 1.0 + 0.15 * 40.0 / double(n);
        auto g = std::make_shared<const fs::RadialGrid>(fs::make_grid(3, opt));
        int j = 0;
        for (double s : {0.25, 0.5, 0.75}) {
            if (n == 80 && s != 0.5) {
                ++j;
                continue;
            }
            auto f = fs::assemble_forms(*g, s);
            auto u = fs::RadialFunction::sample(g, [](double r) { return std::exp(-r * r) * (1 + r); });
            err[i][j++] = rel(fs::seminorm_s_sq(u, f), brute_seminorm(u, hk::PairKernel(3, s), s));
        }
        ++i;
    }
    for (int j = 0; j < 3; ++j) CHECK(err[0][j] < 5e-3);
    CHECK(err[1][1] < 0.35 * err[0][1]);
}

TEST_CASE("norms") {
    const auto& st = setup(3, 0.5);
    const auto& f = st.forms;
    auto u = bump(st.grid, 1.3);
    fs::RadialFunction zero(st.grid, Eigen::VectorXd::Zero(u.values.size()));
    CHECK(fs::norm_lambda_sq(zero, 0.5, f) == 0.0);
    CHECK(fs::norm_lambda_sq(u, 0.0, f) == fs::dirichlet_energy(u, f));
    CHECK_THROWS_AS(fs::norm_lambda_sq(u, 1.0, f), DomainError);
    CHECK_THROWS_AS(fs::lp_norm(u, 0.5), DomainError);
    fs::RadialFunction v(st.grid, -2.5 * u.values);
    for (double q : {1.0, 2.0, 4.0, 6.0}) CHECK(rel(fs::lp_norm(v, q), 2.5 * fs::lp_norm(u, q)) < 1e-14);
    // consistent and lumped L^2 agree to discretization accuracy
    CHECK(rel(std::pow(fs::lp_norm(u, 2), 2), fs::mass_form(u, f)) < 1e-3);

    // positivity of the lambda-norm near the top of the admissible range
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd x(u.values.size());
        for (auto& c : x) c = nd(rng);
        x[x.size() - 1] = 0.0;
        CHECK(fs::norm_lambda_sq(fs::RadialFunction(st.grid, x), 0.9, f) > 0.0);
    }
}

TEST_CASE("Gaussian L^q golden values from direct quadrature") {
    const auto& st = setup(3, 0.5);
    auto u = bump(st.grid, 1.0);
    for (double q : {2.0, 4.0, 6.0}) {
        const double exact = hypfrac::quad::integrate_adaptive(
            [q](double r) { return std::exp(-q * r * r) * hypfrac::geometry::radial_volume_weight(3, r); }, 0.0, 12.0, 1e-13);
        CHECK(rel(fs::lp_integral(u, q), exact) < 1e-3);
    }
}

TEST_CASE("grid refinement of the norms") {
    const auto& a = setup(3, 0.5, 400), &b = setup(3, 0.5, 800);
    for (double w : {0.4, 1.0, 2.5}) {
        auto ua = bump(a.grid, w), ub = bump(b.grid, w);
        CHECK(rel(fs::dirichlet_energy(ua, a.forms), fs::dirichlet_energy(ub, b.forms)) < 1e-3);
        CHECK(rel(fs::mass_form(ua, a.forms), fs::mass_form(ub, b.forms)) < 1e-3);
        CHECK(rel(fs::seminorm_s_sq(ua, a.forms), fs::seminorm_s_sq(ub, b.forms)) < 1e-3);
        CHECK(rel(fs::lp_norm(ua, 4), fs::lp_norm(ub, 4)) < 1e-3);
    }
}

TEST_CASE("spectral bottom") {
    for (int N : {2, 3, 4, 5}) {
        auto g = std::make_shared<const fs::RadialGrid>(fs::make_grid(N, fs::GridOptions{}));
        const auto f = fs::assemble_local_forms(*g);
        const double bottom = fs::spectral_bottom(N);
        double lo = 1e300;
        for (const auto& u : bump_ring_family(g)) lo = std::min(lo, fs::dirichlet_energy(u, f) / fs::mass_form(u, f));
        CHECK(lo >= 0.98 * bottom);
        // the Dirichlet ball lifts the bottom by about (pi/R)^2, 10% of 1/4 at N = 2 and R = 20
        auto gb = std::make_shared<const fs::RadialGrid>(fs::make_grid(N, fs::scaled_grid_options(fs::broad_profile_radius(N), 400)));
        const auto fb = fs::assemble_local_forms(*gb);
        auto broad = fs::broad_profile(gb);
        const double rq = fs::dirichlet_energy(broad, fb) / fs::mass_form(broad, fb);
        CHECK(rq >= 0.98 * bottom);
        CHECK(rq <= 1.05 * bottom);
    }
    CHECK(fs::broad_profile_radius(2) == 40.0);
    CHECK(fs::broad_profile_radius(3) == 20.0);
}

TEST_CASE("embedding ratio and far-field decay of the seminorm") {
    const auto& st = setup(3, 0.5);
    double mx = 0.0;
    for (const auto& u : bump_ring_family(st.grid)) {
        const double r = fs::seminorm_s_sq(u, st.forms) / fs::dirichlet_energy(u, st.forms);
        CHECK(std::isfinite(r));
        mx = std::max(mx, r);
    }
    CHECK(mx > 0.0);
    CHECK(mx < 10.0);
    // cross term between a centred bump and a ring shrinks as the ring moves out
    auto one = bump(st.grid, 0.5);
    double prev = 1e300;
    for (double c : {2.0, 3.0, 4.0, 6.0, 8.0}) {
        auto two = ring(st.grid, c, 0.5);
        fs::RadialFunction sum(st.grid, one.values + two.values);
        const double cross = fs::seminorm_s_sq(sum, st.forms) - fs::seminorm_s_sq(one, st.forms) - fs::seminorm_s_sq(two, st.forms);
        const double scaled = std::fabs(cross) / std::sqrt(fs::seminorm_s_sq(one, st.forms) * fs::seminorm_s_sq(two, st.forms));
        CHECK(scaled < prev);
        prev = scaled;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("Schwarz rearrangement") {
    const auto& st = setup(3, 0.5);
    const auto& f = st.forms;
    auto mono = bump(st.grid, 0.8);
    auto ms = fs::schwarz_rearrange(mono);
    CHECK((ms.values - mono.values).cwiseAbs().maxCoeff() < 1e-12);

    fs::RadialFunction neg(st.grid, -mono.values);
    CHECK_THROWS_AS(fs::schwarz_rearrange(neg), DomainError);

    for (const auto& u : random_profiles(st.grid, 100)) {
        auto us = fs::schwarz_rearrange(u);
        for (Eigen::Index i = 0; i + 1 < us.values.size(); ++i) REQUIRE(us.values[i] >= us.values[i + 1]);
        for (double q : {2.0, 4.0, 6.0}) CHECK(rel(fs::lp_norm(us, q), fs::lp_norm(u, q)) < 1e-3);
        CHECK(fs::dirichlet_energy(us, f) <= fs::dirichlet_energy(u, f) * (1 + 1e-3));
        CHECK(fs::seminorm_s_sq(us, f) <= fs::seminorm_s_sq(u, f) * (1 + 1e-3));
        auto uss = fs::schwarz_rearrange(us);
        CHECK((uss.values - us.values).cwiseAbs().maxCoeff() <= 1e-12 * us.values.maxCoeff());
    }
}

TEST_CASE("Sobolev and mixed quotients") {
    const auto& st = setup(3, 0.5);
    const auto& f = st.forms;
    auto u = bump(st.grid, 0.7);
    fs::RadialFunction v(st.grid, 3.7 * u.values);
    CHECK(rel(fs::sobolev_quotient(v, 0.5, 3.0, f), fs::sobolev_quotient(u, 0.5, 3.0, f)) < 1e-13);
    CHECK(rel(fs::mixed_quotient(v, 0.5, f), fs::mixed_quotient(u, 0.5, f)) < 1e-13);
    fs::RadialFunction zero(st.grid, Eigen::VectorXd::Zero(u.values.size()));
    CHECK_THROWS_AS(fs::sobolev_quotient(zero, 0.0, 3.0, f), DomainError);
    CHECK_THROWS_AS(fs::mixed_quotient(zero, 0.0, f), DomainError);

    const auto est = fs::estimate_sobolev_constant(st.grid, 0.0, 3.0, f);
    CHECK(est.value > 0.0);
    CHECK(std::isfinite(est.value));
    for (const auto& w : bump_ring_family(st.grid)) {
        CHECK(fs::sobolev_quotient(w, 0.0, 3.0, f) >= est.value * (1 - 1e-9));
        // dropping the seminorm can only lower the quotient
        const double d = fs::lp_norm(w, 6.0);
        CHECK(fs::mixed_quotient(w, 0.5, f) >= fs::norm_lambda_sq(w, 0.5, f) / (d * d));
    }
}

TEST_CASE("concentration trend and the extrapolated mixed constant") {
    const auto& st = setup(3, 0.5);
    const std::vector<double> eps{0.01, 0.014, 0.02, 0.028, 0.04, 0.056, 0.08, 0.11};
    auto est = fs::estimate_mixed_constant(st.grid, 0.5, st.forms, eps);
    for (std::size_t i = 1; i < eps.size(); ++i) CHECK(est.quotient[i] > est.quotient[i - 1]);
    // the limit sits below every sampled quotient and near the Euclidean constant 3 (pi/2)^{4/3}
    CHECK(est.value < est.quotient.front());
    CHECK(rel(est.value, 3.0 * std::pow(std::numbers::pi / 2.0, 4.0 / 3.0)) < 0.02);
}

TEST_CASE("CSV round trip") {
    const auto& st = setup(3, 0.5, 160);
    auto u = bump(st.grid, 0.9);
    std::stringstream ss;
    fs::write_csv(ss, u);
    auto v = fs::read_csv(ss, st.grid);
    CHECK((u.values - v.values).cwiseAbs().maxCoeff() == 0.0);
    std::stringstream bad("x,y\n0,1\n");
    CHECK_THROWS_AS(fs::read_csv(bad, st.grid), hypfrac::ValidationError);
    CHECK_THROWS_AS(fs::check_forms(*setup(3, 0.5, 400).grid, st.forms), hypfrac::ValidationError);
}
