#pragma once

#include <vector>

namespace hypfrac::geometry {

using BallPoint = std::vector<double>;

// Points with |x| > 1 - kBoundaryMargin are rejected.
inline constexpr double kBoundaryMargin = 1e-12;

void validate_point(const BallPoint& x);

// T_a(x); maps a to the origin.
BallPoint mobius_translate(const BallPoint& a, const BallPoint& x);

double geodesic_distance(const BallPoint& x, const BallPoint& y);

// Area of the unit sphere S^{n} embedded in R^{n+1}.
double sphere_area(int n);

// omega_{N-1} sinh^{N-1}(r)
double radial_volume_weight(int N, double r);

// log sinh(r) for r > 0, stable for large r.
double log_sinh(double r);

}  // namespace hypfrac::geometry
