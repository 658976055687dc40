#include "hypfrac/geometry.hpp"
#include "hypfrac/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hypfrac::geometry {

namespace {

double dot(const BallPoint& a, const BallPoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

void validate_point(const BallPoint& x) {
    if (x.empty()) throw DomainError("ball point has no coordinates");
    double n2 = dot(x, x);
    if (!std::isfinite(n2) || std::sqrt(n2) > 1.0 - kBoundaryMargin)
        throw DomainError("point outside the admissible ball: |x| = " + std::to_string(std::sqrt(n2)));
}

BallPoint mobius_translate(const BallPoint& a, const BallPoint& x) {
    validate_point(a);
    validate_point(x);
    if (a.size() != x.size()) throw DomainError("dimension mismatch in mobius_translate");
    const double a2 = dot(a, a), x2 = dot(x, x), xa = dot(x, a);
    double diff2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff2 += (x[i] - a[i]) * (x[i] - a[i]);
    const double den = 1.0 - 2.0 * xa + x2 * a2;
    if (!(den > 1e-300))
        throw DomainError("Mobius denominator underflow (" + std::to_string(den) + "); points too close to the boundary");
    BallPoint out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = (diff2 * a[i] - (1.0 - a2) * (x[i] - a[i])) / den;
    return out;
}

double geodesic_distance(const BallPoint& x, const BallPoint& y) {
    BallPoint t = mobius_translate(y, x);
    const double r = std::sqrt(dot(t, t));
    // log((1+r)/(1-r)) = 2 atanh r, better conditioned near 0
    return 2.0 * std::atanh(r);
}

double sphere_area(int n) {
    const double m = 0.5 * (n + 1);
    return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

double radial_volume_weight(int N, double r) {
    if (N < 2) throw DomainError("radial_volume_weight requires N >= 2");
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and nonnegative");
    return sphere_area(N - 1) * std::pow(std::sinh(r), N - 1);
}

double log_sinh(double r) {
    if (r > 20.0) return r - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * r));
    return std::log(std::sinh(r));
}

}  // namespace hypfrac::geometry
