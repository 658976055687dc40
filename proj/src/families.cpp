#include "hypfrac/families.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace hypfrac::funcspace {

RadialFunction gaussian_bump(std::shared_ptr<const RadialGrid> g, double a) {
    return RadialFunction::sample(std::move(g), [a](double r) { return std::exp(-(r / a) * (r / a)); });
}

RadialFunction gaussian_ring(std::shared_ptr<const RadialGrid> g, double c, double w) {
    return RadialFunction::sample(std::move(g), [c, w](double r) { return std::exp(-((r - c) / w) * ((r - c) / w)); });
}

std::vector<RadialFunction> bump_ring_family(std::shared_ptr<const RadialGrid> g) {
    std::vector<RadialFunction> out;
    for (int i = 0; i < 25; ++i) out.push_back(gaussian_bump(g, 0.05 * std::pow(100.0, i / 24.0)));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) out.push_back(gaussian_ring(g, 1.0 + 7.0 * i / 4.0, 0.3 + 1.2 * j / 4.0));
    return out;
}

std::vector<RadialFunction> random_profiles(std::shared_ptr<const RadialGrid> g, int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> cen(0.0, 6.0), wid(0.15, 2.0), amp(0.1, 1.0);
    std::uniform_int_distribution<int> k(1, 4);
    std::vector<RadialFunction> out;
    for (int n = 0; n < count; ++n) {
        std::vector<std::array<double, 3>> parts(k(rng));
        for (auto& p : parts) p = {cen(rng), wid(rng), amp(rng)};
        out.push_back(RadialFunction::sample(g, [&](double r) {
            double v = 0.0;
            for (auto& p : parts) v += p[2] * std::exp(-((r - p[0]) / p[1]) * ((r - p[0]) / p[1]));
            return v;
        }));
    }
    return out;
}

RadialFunction broad_profile(std::shared_ptr<const RadialGrid> g) {
    const int N = g->N;
    const double R = g->R_max();
    return RadialFunction::sample(std::move(g), [N, R](double r) {
        return std::sin(std::numbers::pi * r / R) * std::pow(std::cosh(r), -0.5 * (N - 1));
    });
}

double broad_profile_radius(int N) {
    const double R = std::numbers::pi / std::sqrt(0.025 * spectral_bottom(N));
    return std::max(20.0, 10.0 * std::ceil(R / 10.0 - 1e-9));
}

}  // namespace hypfrac::funcspace
