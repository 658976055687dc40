#pragma once

#include "hypfrac/funcspace.hpp"

#include <memory>
#include <vector>

namespace hypfrac::funcspace {

// exp(-(r/a)^2), and a Gaussian ring exp(-((r-c)/w)^2)
RadialFunction gaussian_bump(std::shared_ptr<const RadialGrid> g, double a);
RadialFunction gaussian_ring(std::shared_ptr<const RadialGrid> g, double c, double w);

// 25 bumps (widths 0.05..5, log-spaced) and 25 rings (centres 1..8, widths 0.3..1.5)
std::vector<RadialFunction> bump_ring_family(std::shared_ptr<const RadialGrid> g);

// smooth nonnegative profiles: sums of 1-4 Gaussians with centres U(0,6), widths U(0.15,2), heights U(0.1,1)
std::vector<RadialFunction> random_profiles(std::shared_ptr<const RadialGrid> g, int count, unsigned seed = 7);

// sin(pi r / R) cosh(r)^{-(N-1)/2}: close to the bottom of the spectrum on the ball of radius R
RadialFunction broad_profile(std::shared_ptr<const RadialGrid> g);
// ball radius (a multiple of 10, at least 20) at which the Dirichlet lift of the bottom,
// about (pi/R)^2, is below 2.5% of (N-1)^2/4
double broad_profile_radius(int N);

}  // namespace hypfrac::funcspace
