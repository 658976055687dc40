#include "hypfrac/quadrature.hpp"
#include "hypfrac/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>
#include <tuple>

namespace hypfrac::quad {

Rule gauss_legendre(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre needs n >= 1");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        // recompute derivative at converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    return r;
}

Rule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1 || !(alpha > -1.0) || !(beta > -1.0)) throw DomainError("invalid Gauss-Jacobi parameters");
    // Golub-Welsch on the symmetric Jacobi matrix
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double d = 2.0 * k + ab;
        J(k, k) = k == 0 ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (d * (d + 2.0));
        if (k + 1 < n) {
            const double k1 = k + 1.0;
            const double d1 = 2.0 * k1 + ab;
            // for k1 = 1 the factor (k1 + ab) cancels against (d1 - 1)
            const double num = k == 0 ? 4.0 * (1.0 + alpha) * (1.0 + beta)
                                      : 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
            const double den = k == 0 ? d1 * d1 * (d1 + 1.0) : d1 * d1 * (d1 + 1.0) * (d1 - 1.0);
            J(k, k + 1) = J(k + 1, k) = std::sqrt(num / den);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                       std::tgamma(ab + 2.0);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v * v;
    }
    return r;
}

Rule gauss_jacobi_unit(int n, double alpha, double beta) {
    static std::mutex mtx;
    static std::map<std::tuple<int, double, double>, Rule> cache;
    {
        std::lock_guard<std::mutex> lk(mtx);
        auto it = cache.find({n, alpha, beta});
        if (it != cache.end()) return it->second;
    }
    Rule r = gauss_jacobi(n, alpha, beta);
    const double scale = std::pow(0.5, alpha + beta + 1.0);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
        r.weights[i] *= scale;
    }
    std::lock_guard<std::mutex> lk(mtx);
    cache.emplace(std::make_tuple(n, alpha, beta), r);
    return r;
}

double integrate_semi_infinite(const Integrand& f, double lower, double tol, const SemiInfiniteOptions& opt) {
    return integrate_semi_infinite([&f](double t, double) { return f(t); }, lower, tol, opt);
}

double integrate_semi_infinite(const OffsetIntegrand& f, double lower, double tol, const SemiInfiniteOptions& opt) {
    if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
    if (!(opt.scale > 0.0)) throw DomainError("quadrature scale must be positive");
    constexpr double hpi = 0.5 * std::numbers::pi;
    const double L = opt.scale;

    // integrand in the double-exponential variable t
    auto g = [&](double t) {
        const double e = std::exp(hpi * std::sinh(t));
        const double dx = L * hpi * std::cosh(t) * e;
        const double y = L * e;
        if (opt.sqrt_endpoint) {
            // x = lower + y^2, dx = 2 y dy
            const double v = f(lower + y * y, y * y);
            return v == 0.0 ? 0.0 : 2.0 * y * v * dx;
        }
        const double v = f(lower + y, y);
        return v == 0.0 ? 0.0 : v * dx;
    };

    // one-sided sweep from t0 in steps of +-h until terms are negligible
    const double tmax = opt.sqrt_endpoint ? 5.5 : 6.5;  // e^{pi/2 sinh t} stays finite (and its square)
    auto sweep = [&](double t0, double h, double dir, double ref) {
        double s = 0.0;
        int small = 0;
        for (double t = t0; t <= tmax; t += h) {
            const double v = g(dir * t);
            if (!std::isfinite(v)) break;
            s += v;
            if (std::fabs(v) <= 1e-18 * std::fabs(ref + s)) {
                if (++small >= 3) break;
            } else {
                small = 0;
            }
        }
        return s;
    };

    double h = 1.0;
    double sum = g(0.0);
    sum += sweep(h, h, 1.0, sum);
    sum += sweep(h, h, -1.0, sum);
    double result = h * sum;
    double err = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= opt.max_levels; ++level) {
        h *= 0.5;
        // new points are odd multiples of h
        double add = 0.0;
        for (double dir : {1.0, -1.0}) {
            int small = 0;
            for (double t = h; t <= tmax; t += 2.0 * h) {
                const double v = g(dir * t);
                if (!std::isfinite(v)) break;
                add += v;
                if (std::fabs(v) <= 1e-18 * std::fabs(sum + add)) {
                    if (++small >= 3) break;
                } else {
                    small = 0;
                }
            }
        }
        sum += add;
        const double next = h * sum;
        err = std::fabs(next - result);
        result = next;
        const double target = opt.relative ? tol * std::fabs(result) : tol;
        if (level >= 3 && err <= target) return result;
    }
    throw QuadratureError("exp-sinh quadrature did not converge (estimate " + std::to_string(err) + ")", err);
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const Integrand& f, double a, double b, double& val, double& err) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * kWgk[7], rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double x = hw * kXgk[j];
        const double f1 = f(c - x), f2 = f(c + x);
        rk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    val = rk * hw;
    err = std::fabs((rk - rg) * hw);
}

}  // namespace

double integrate_adaptive(const Integrand& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
    if (a == b) return 0.0;
    struct Piece {
        double a, b, val, err;
        int depth;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    // global adaptivity: always bisect the piece with the largest error estimate
    std::priority_queue<Piece> heap;
    double v, e;
    gk15(f, a, b, v, e);
    heap.push({a, b, v, e, 0});
    double total = v, total_err = e;
    for (int iter = 0; iter < 50000 && total_err > tol && !heap.empty(); ++iter) {
        Piece p = heap.top();
        heap.pop();
        if (p.depth >= 30) continue;  // frozen: its error stays in total_err
        const double m = 0.5 * (p.a + p.b);
        double l, le, r, re;
        gk15(f, p.a, m, l, le);
        gk15(f, m, p.b, r, re);
        total += l + r - p.val;
        total_err += le + re - p.err;
        heap.push({p.a, m, l, le, p.depth + 1});
        heap.push({m, p.b, r, re, p.depth + 1});
    }
    if (!(total_err <= tol))
        throw QuadratureError("adaptive Gauss-Kronrod stopped at depth 30 (estimate " + std::to_string(total_err) + ")",
                              total_err);
    return total;
}

}  // namespace hypfrac::quad
