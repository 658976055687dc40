#include "hypfrac/funcspace.hpp"
#include "hypfrac/errors.hpp"
#include "hypfrac/geometry.hpp"
#include "hypfrac/parallel.hpp"
#include "hypfrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hypfrac::funcspace {

namespace {

const quad::Rule& gl(int n) {
    static const quad::Rule r3 = quad::gauss_legendre(3), r6 = quad::gauss_legendre(6), r8 = quad::gauss_legendre(8),
                            r20 = quad::gauss_legendre(20);
    switch (n) {
        case 3: return r3;
        case 6: return r6;
        case 8: return r8;
        default: return r20;
    }
}

void fill_weights(RadialGrid& g) {
    const std::size_t n = g.nodes.size();
    g.weights.assign(n, 0.0);
    g.element_volume.assign(n - 1, 0.0);
    const quad::Rule& q = gl(20);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double a = g.nodes[e], h = g.nodes[e + 1] - a;
        double vol = 0.0, wa = 0.0, wb = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double x = 0.5 * (q.nodes[k] + 1.0);
            const double dv = 0.5 * h * q.weights[k] * geometry::radial_volume_weight(g.N, a + h * x);
            vol += dv;
            wa += (1.0 - x) * dv;
            wb += x * dv;
        }
        g.element_volume[e] = vol;
        g.weights[e] += wa;
        g.weights[e + 1] += wb;
    }
}

void validate_nodes(const std::vector<double>& r) {
    if (r.size() < 3) throw DomainError("radial grid needs at least three nodes");
    if (r[0] != 0.0) throw DomainError("radial grid must start at r = 0");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1]) || !std::isfinite(r[i])) throw DomainError("radial grid nodes must be strictly increasing");
}

// Linear least squares via QR; columns are basis functions evaluated at the samples.
Eigen::VectorXd lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) { return A.colPivHouseholderQr().solve(b); }

// Coarse scan followed by golden-section refinement; returns the argmin.
template <class F>
double minimize_1d(F&& f, double lo, double hi, int scan = 16, int iters = 60) {
    double best = lo, fbest = f(lo);
    const double step = (hi - lo) / scan;
    for (int i = 1; i <= scan; ++i) {
        const double x = lo + i * step, fx = f(x);
        if (fx < fbest) best = x, fbest = fx;
    }
    double a = std::max(lo, best - step), b = std::min(hi, best + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iters; ++k) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - gr * (b - a), fc = f(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + gr * (b - a), fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return f(x) <= fbest ? x : best;
}

}  // namespace

std::uint64_t RadialGrid::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t len) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    };
    mix(&N, sizeof N);
    for (double r : nodes) mix(&r, sizeof r);
    return h;
}

RadialGrid make_grid(int N, std::vector<double> nodes) {
    if (N < 2) throw DomainError("dimension must be at least 2");
    validate_nodes(nodes);
    RadialGrid g;
    g.N = N;
    g.nodes = std::move(nodes);
    fill_weights(g);
    return g;
}

namespace {

// Step-size profile h(r) = min(h_min + b r, H) up to r_mid, then h(r_mid) + d (r - r_mid).
// F(r) = int_0^r dr / h counts elements; nodes are F^{-1}(0..m) with H chosen so F(R) = m.
struct StepProfile {
    double h0, b, H, rmid, d, R;
    double r1() const { return std::min((H - h0) / b, rmid); }
    double hmid() const { return std::min(h0 + b * rmid, H); }
    double F(double r) const {
        const double a = r1();
        if (r <= a) return std::log1p(b * r / h0) / b;
        double f = std::log1p(b * a / h0) / b;
        if (r <= rmid) return f + (r - a) / H;
        f += (rmid - a) / H;
        return f + (d > 0.0 ? std::log1p(d * (r - rmid) / hmid()) / d : (r - rmid) / hmid());
    }
    double Finv(double y) const {
        const double a = r1();
        const double fa = std::log1p(b * a / h0) / b;
        if (y <= fa) return std::expm1(b * y) * h0 / b;
        const double fm = fa + (rmid - a) / H;
        if (y <= fm) return a + (y - fa) * H;
        return rmid + (d > 0.0 ? std::expm1(d * (y - fm)) * hmid() / d : (y - fm) * hmid());
    }
};

}  // namespace

GridOptions scaled_grid_options(double R_max, std::size_t node_count, Spacing spacing) {
    GridOptions o;
    o.R_max = R_max;
    o.node_count = node_count;
    o.spacing = spacing;
    if (node_count == 0) return o;
    const double f = 400.0 / double(node_count);
    o.h_min *= f;
    o.growth = 1.0 + (o.growth - 1.0) * f;
    o.outer_growth = 1.0 + (o.outer_growth - 1.0) * f;
    return o;
}

Spacing spacing_from_string(const std::string& s) {
    if (s == "graded") return Spacing::graded;
    if (s == "geometric") return Spacing::geometric;
    if (s == "uniform") return Spacing::uniform;
    throw ValidationError("unknown grid spacing '" + s + "' (graded, geometric, uniform)");
}

std::string to_string(Spacing s) {
    switch (s) {
        case Spacing::graded: return "graded";
        case Spacing::geometric: return "geometric";
        case Spacing::uniform: return "uniform";
    }
    return "graded";
}

RadialGrid make_grid(int N, const GridOptions& opt) {
    if (!(opt.R_max > 0.0)) throw DomainError("R_max must be positive");
    if (opt.node_count < 3) throw DomainError("node_count must be at least 3");
    const std::size_t m = opt.node_count - 1;  // elements
    std::vector<double> r{0.0};
    if (opt.spacing == Spacing::uniform) {
        for (std::size_t i = 1; i <= m; ++i) r.push_back(opt.R_max * double(i) / double(m));
        return make_grid(N, std::move(r));
    }
    if (!(opt.h_min > 0.0) || !(opt.growth > 1.0) || !(opt.outer_growth >= 1.0))
        throw DomainError("invalid graded grid parameters");
    // with b = log(growth) consecutive steps have ratio exactly `growth` and the first one is h_min
    const double b = std::log(opt.growth);
    StepProfile sp{opt.h_min * b / (opt.growth - 1.0), b, 0.0, opt.R_max, 0.0, opt.R_max};
    if (opt.spacing == Spacing::graded) {
        sp.rmid = std::min(opt.r_mid, opt.R_max);
        sp.d = std::log(opt.outer_growth);
    }
    // F(R) decreases in H; bisect in log H for F(R) = m
    double lo = sp.h0, hi = opt.R_max;
    sp.H = lo;
    if (sp.F(opt.R_max) < double(m)) throw DomainError("h_min too large for the requested node count");
    for (int it = 0; it < 200; ++it) {
        sp.H = std::sqrt(lo * hi);
        (sp.F(opt.R_max) > double(m) ? lo : hi) = sp.H;
    }
    sp.H = hi;
    const double scale = double(m) / sp.F(opt.R_max);  // absorbs the bisection residual
    for (std::size_t i = 1; i < m; ++i) r.push_back(sp.Finv(double(i) / scale));
    r.push_back(opt.R_max);
    return make_grid(N, std::move(r));
}

RadialFunction::RadialFunction(std::shared_ptr<const RadialGrid> g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw DomainError("radial function needs a grid");
    if (values.size() != static_cast<Eigen::Index>(grid->size())) throw DomainError("value count does not match grid");
    if (!values.allFinite()) throw DomainError("radial function values must be finite");
}

RadialFunction RadialFunction::sample(std::shared_ptr<const RadialGrid> g, const std::function<double(double)>& f) {
    Eigen::VectorXd v(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) v[i] = f(g->nodes[i]);
    v[v.size() - 1] = 0.0;
    return RadialFunction(std::move(g), std::move(v));
}

double RadialFunction::operator()(double r) const {
    const auto& x = grid->nodes;
    if (r <= 0.0) return values[0];
    if (r >= x.back()) return 0.0;
    const std::size_t j = std::upper_bound(x.begin(), x.end(), r) - x.begin();
    const double t = (r - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - t) * values[j - 1] + t * values[j];
}

void write_csv(std::ostream& os, const RadialFunction& u) {
    os << "r,u\n";
    os.precision(17);
    for (std::size_t i = 0; i < u.size(); ++i) os << u.grid->nodes[i] << ',' << u.values[i] << '\n';
}

RadialFunction read_csv(std::istream& is, std::shared_ptr<const RadialGrid> g) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("r,u", 0) != 0) throw ValidationError("profile CSV must start with header r,u");
    std::vector<double> r, u;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double a, b;
        char comma;
        if (!(ss >> a >> comma >> b) || comma != ',') throw ValidationError("malformed profile CSV line: " + line);
        r.push_back(a);
        u.push_back(b);
    }
    if (r.size() != g->size()) throw ValidationError("profile CSV node count does not match grid");
    for (std::size_t i = 0; i < r.size(); ++i)
        if (std::fabs(r[i] - g->nodes[i]) > 1e-12 * (1.0 + g->nodes[i])) throw ValidationError("profile CSV nodes do not match grid");
    return RadialFunction(std::move(g), Eigen::Map<Eigen::VectorXd>(u.data(), Eigen::Index(u.size())));
}

QuadraticForms assemble_local_forms(const RadialGrid& grid) {
    const std::size_t n = grid.size();
    const auto& r = grid.nodes;
    QuadraticForms f;
    f.N = grid.N;
    f.s = 0.0;
    f.grid_hash = grid.hash();
    f.stiffness = Eigen::MatrixXd::Zero(n, n);
    f.mass = Eigen::MatrixXd::Zero(n, n);
    const quad::Rule& q = gl(20);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double h = r[e + 1] - r[e];
        double maa = 0.0, mab = 0.0, mbb = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double x = 0.5 * (q.nodes[i] + 1.0);
            const double dv = 0.5 * h * q.weights[i] * geometry::radial_volume_weight(grid.N, r[e] + h * x);
            maa += (1.0 - x) * (1.0 - x) * dv;
            mab += (1.0 - x) * x * dv;
            mbb += x * x * dv;
        }
        f.mass(e, e) += maa;
        f.mass(e + 1, e + 1) += mbb;
        f.mass(e, e + 1) += mab;
        f.mass(e + 1, e) += mab;
        const double k = grid.element_volume[e] / (h * h);
        f.stiffness(e, e) += k;
        f.stiffness(e + 1, e + 1) += k;
        f.stiffness(e, e + 1) -= k;
        f.stiffness(e + 1, e) -= k;
    }
    f.nonlocal = f.nonlocal_interior = f.nonlocal_tail = Eigen::MatrixXd::Zero(n, n);
    return f;
}

QuadraticForms assemble_forms(const RadialGrid& grid, const kernel::PairKernel& pk, const kernel::ReducedKernel& rk) {
    const std::size_t n = grid.size();
    if (rk.dim != grid.N || pk.dim() != grid.N || rk.r_grid != grid.nodes || rk.order != pk.order())
        throw ValidationError("reduced kernel was built for a different grid or order");
    const double s = pk.order();
    const auto& r = grid.nodes;
    const kernel::DiagonalModel& model = rk.diagonal_model;
    const double ex = model.exponent;

    QuadraticForms f = assemble_local_forms(grid);
    f.s = s;

    // W ~ ratio * model, ratio interpolated bilinearly (in log where all corners are positive)
    auto ratio_at = [&](std::size_t e, std::size_t g, double x, double y) {
        const double r00 = rk.ratio(e, g), r10 = rk.ratio(e + 1, g), r01 = rk.ratio(e, g + 1), r11 = rk.ratio(e + 1, g + 1);
        if (r00 > 0.0 && r10 > 0.0 && r01 > 0.0 && r11 > 0.0)
            return std::exp((1 - x) * (1 - y) * std::log(r00) + x * (1 - y) * std::log(r10) + (1 - x) * y * std::log(r01) +
                            x * y * std::log(r11));
        return (1 - x) * (1 - y) * r00 + x * (1 - y) * r10 + (1 - x) * y * r01 + x * y * r11;
    };

    const std::size_t m = n - 1;
    const quad::Rule& g8 = gl(8);
    const quad::Rule same = quad::gauss_jacobi_unit(8, 1.0, 1.0 - 2.0 * s);
    const quad::Rule corner = quad::gauss_jacobi_unit(8, 0.0, 2.0 - 2.0 * s);

    // per-row contributions, scattered serially so the sum order is fixed
    struct Block {
        std::size_t e, g;
        Eigen::Matrix4d a;
    };
    std::vector<std::vector<Block>> rows(m);
    parallel_for(m, [&](std::size_t e) {
        const double ae = r[e], he = r[e + 1] - ae;
        auto& out = rows[e];
        {
            // same element: (u1-u2)^2 = (du)^2 (delta/h)^2, delta = h xi, r1 = a + h (1-xi) t
            double acc = 0.0;
            for (int i = 0; i < 8; ++i) {
                const double xi = same.nodes[i];
                for (int j = 0; j < 8; ++j) {
                    const double t = 0.5 * (g8.nodes[j] + 1.0), wt = 0.5 * g8.weights[j];
                    const double x = (1 - xi) * t, y = x + xi;
                    acc += same.weights[i] * wt * ratio_at(e, e, x, y) * model.c(ae + he * x, ae + he * y);
                }
            }
            const double val = 2.0 * std::pow(he, 1.0 - 2.0 * s) * acc;
            Block b{e, e, Eigen::Matrix4d::Zero()};
            b.a(0, 0) = b.a(1, 1) = val;
            b.a(0, 1) = b.a(1, 0) = -val;
            out.push_back(b);
        }
        if (e + 1 < m) {
            // adjacent elements around node b = e+1; x = b - r1, y = r2 - b
            const double hf = r[e + 2] - r[e + 1], rb = r[e + 1];
            Eigen::Matrix3d loc = Eigen::Matrix3d::Zero();
            for (int tri = 0; tri < 2; ++tri)
                for (int i = 0; i < 8; ++i) {
                    const double sg = corner.nodes[i];
                    for (int j = 0; j < 8; ++j) {
                        const double tau = 0.5 * (g8.nodes[j] + 1.0), wt = 0.5 * g8.weights[j];
                        // unit-sigma coordinates
                        const double px = tri == 0 ? 1.0 : tau, py = tri == 0 ? tau : 1.0;
                        const double x = he * sg * px, y = hf * sg * py;
                        const Eigen::Vector3d v(px, -px + py, -py);
                        const double dl = he * px + hf * py;  // delta / sigma
                        const double w = corner.weights[i] * wt * he * hf * std::pow(dl, -ex) *
                                         ratio_at(e, e + 1, 1.0 - x / he, y / hf) * model.c(rb - x, rb + y);
                        loc += w * v * v.transpose();
                    }
                }
            Block b{e, e + 1, Eigen::Matrix4d::Zero()};
            b.a.topLeftCorner<3, 3>() = 2.0 * loc;
            out.push_back(b);
        }
        for (std::size_t g = e + 2; g < m; ++g) {
            const double ag = r[g], hg = r[g + 1] - ag;
            const int q = g - e <= 3 ? 6 : 3;
            const quad::Rule& rule = gl(q);
            Eigen::Matrix4d loc = Eigen::Matrix4d::Zero();
            for (int i = 0; i < q; ++i) {
                const double x = 0.5 * (rule.nodes[i] + 1.0), r1 = ae + he * x;
                for (int j = 0; j < q; ++j) {
                    const double y = 0.5 * (rule.nodes[j] + 1.0), r2 = ag + hg * y;
                    const double w = 0.25 * rule.weights[i] * rule.weights[j] * he * hg * ratio_at(e, g, x, y) * model(r1, r2);
                    const Eigen::Vector4d v(1 - x, x, -(1 - y), -y);
                    loc += w * v * v.transpose();
                }
            }
            out.push_back(Block{e, g, 2.0 * loc});
        }
    });
    f.nonlocal_interior = Eigen::MatrixXd::Zero(n, n);
    for (const auto& row : rows)
        for (const Block& b : row) {
            std::size_t idx[4];
            int cnt;
            if (b.g == b.e) {
                idx[0] = b.e, idx[1] = b.e + 1, cnt = 2;
            } else if (b.g == b.e + 1) {
                idx[0] = b.e, idx[1] = b.e + 1, idx[2] = b.e + 2, cnt = 3;
            } else {
                idx[0] = b.e, idx[1] = b.e + 1, idx[2] = b.g, idx[3] = b.g + 1, cnt = 4;
            }
            for (int i = 0; i < cnt; ++i)
                for (int j = 0; j < cnt; ++j) f.nonlocal_interior(idx[i], idx[j]) += b.a(i, j);
        }
    f.nonlocal_interior = 0.5 * (f.nonlocal_interior + f.nonlocal_interior.transpose()).eval();

    // 2 int_0^R u(r1)^2 int_R^inf W dr2 dr1 with a consistent P1 mass weighted by the tail
    const double R = r.back();
    std::vector<Eigen::Matrix2d> tails(m);
    parallel_for(m, [&](std::size_t e) {
        const double a = r[e], h = r[e + 1] - a;
        const int q = e + 1 == m ? 8 : 3;
        const quad::Rule& rule = gl(q);
        Eigen::Matrix2d loc = Eigen::Matrix2d::Zero();
        for (int i = 0; i < q; ++i) {
            const double x = 0.5 * (rule.nodes[i] + 1.0);
            const double k = pk.tail(a + h * x, R);
            const Eigen::Vector2d v(1 - x, x);
            loc += 0.5 * rule.weights[i] * h * k * v * v.transpose();
        }
        tails[e] = 2.0 * loc;
    });
    f.nonlocal_tail = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e < m; ++e) f.nonlocal_tail.block<2, 2>(e, e) += tails[e];
    f.nonlocal_tail = 0.5 * (f.nonlocal_tail + f.nonlocal_tail.transpose()).eval();
    f.nonlocal = f.nonlocal_interior + f.nonlocal_tail;
    return f;
}

QuadraticForms assemble_forms(const RadialGrid& grid, double s) {
    kernel::PairKernel pk(grid.N, s);
    return assemble_forms(grid, pk, kernel::build_reduced_kernel(pk, grid.nodes));
}

void check_forms(const RadialGrid& grid, const QuadraticForms& f) {
    const auto n = Eigen::Index(grid.size());
    if (f.N != grid.N || f.grid_hash != grid.hash() || f.stiffness.rows() != n || f.nonlocal.rows() != n || f.mass.rows() != n)
        throw ValidationError("quadratic forms do not belong to this grid");
}

double spectral_bottom(int N) { return 0.25 * (N - 1) * (N - 1); }

namespace {
void check_pair(const RadialFunction& u, const QuadraticForms& f) {
    if (u.values.size() != f.stiffness.rows() || u.grid->hash() != f.grid_hash)
        throw ValidationError("function and forms live on different grids");
}
}  // namespace

double dirichlet_energy(const RadialFunction& u, const QuadraticForms& f) {
    check_pair(u, f);
    return u.values.dot(f.stiffness * u.values);
}

double mass_form(const RadialFunction& u, const QuadraticForms& f) {
    check_pair(u, f);
    return u.values.dot(f.mass * u.values);
}

double norm_lambda_sq(const RadialFunction& u, double lambda, const QuadraticForms& f) {
    if (!(lambda < spectral_bottom(f.N)))
        throw DomainError("lambda must be below (N-1)^2/4 = " + std::to_string(spectral_bottom(f.N)));
    return dirichlet_energy(u, f) - lambda * mass_form(u, f);
}

double seminorm_s_sq(const RadialFunction& u, const QuadraticForms& f) {
    check_pair(u, f);
    return std::max(0.0, u.values.dot(f.nonlocal * u.values));
}

double lp_integral(const RadialFunction& u, double q) {
    if (!(q >= 1.0)) throw DomainError("L^q norm requires q >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::pow(std::fabs(u.values[i]), q) * u.grid->weights[i];
    return acc;
}

double lp_norm(const RadialFunction& u, double q) { return std::pow(lp_integral(u, q), 1.0 / q); }

RadialFunction schwarz_rearrange(const RadialFunction& u) {
    const std::size_t n = u.size();
    if (u.values.minCoeff() < 0.0)
        throw DomainError("Schwarz rearrangement needs u >= 0; apply it to |u|");
    const auto& w = u.grid->weights;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u.values[a] > u.values[b]; });
    // sorted values occupy consecutive volume intervals; average them over the destination cells
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Eigen::Index(n));
    std::size_t k = 0;
    double left = w[order[0]];  // unused volume of source interval k
    for (std::size_t j = 0; j < n; ++j) {
        double need = w[j], acc = 0.0;
        while (need > 0.0 && k < n) {
            const double take = std::min(need, left);
            acc += take * u.values[order[k]];
            need -= take;
            left -= take;
            if (left <= 0.0 && ++k < n) left = w[order[k]];
        }
        out[j] = acc / w[j];
    }
    // cell averages can break ties by rounding; restore monotonicity at that level
    for (std::size_t j = 1; j < n; ++j) out[Eigen::Index(j)] = std::min(out[Eigen::Index(j)], out[Eigen::Index(j - 1)]);
    out[Eigen::Index(n - 1)] = 0.0;
    return RadialFunction(u.grid, std::move(out));
}

double critical_exponent(int N) {
    if (N <= 2) throw DomainError("critical exponent 2N/(N-2) requires N >= 3");
    return 2.0 * N / (N - 2.0);
}

double sobolev_quotient(const RadialFunction& u, double lambda, double p, const QuadraticForms& f) {
    const double d = lp_norm(u, p + 1.0);
    if (!(d > 0.0)) throw DomainError("Sobolev quotient of the zero function");
    return norm_lambda_sq(u, lambda, f) / (d * d);
}

double mixed_quotient(const RadialFunction& u, double lambda, const QuadraticForms& f) {
    const double d = lp_norm(u, critical_exponent(f.N));
    if (!(d > 0.0)) throw DomainError("mixed quotient of the zero function");
    return (norm_lambda_sq(u, lambda, f) + seminorm_s_sq(u, f)) / (d * d);
}

SobolevEstimate estimate_sobolev_constant(std::shared_ptr<const RadialGrid> g, double lambda, double p, const QuadraticForms& f) {
    auto family = [&](double la, double b) {
        const double a = std::exp(la);
        return RadialFunction::sample(g, [&](double r) { return std::exp(-(r / a) * (r / a) - b * std::log(std::cosh(r))); });
    };
    auto inner = [&](double b, double* la_out) {
        auto q = [&](double la) { return sobolev_quotient(family(la, b), lambda, p, f); };
        const double la = minimize_1d(q, std::log(0.05), std::log(20.0));
        if (la_out) *la_out = la;
        return q(la);
    };
    const double b = minimize_1d([&](double bb) { return inner(bb, nullptr); }, 0.0, 4.0, 8, 30);
    SobolevEstimate est;
    double la = 0.0;
    est.value = inner(b, &la);
    est.width = std::exp(la);
    est.decay = b;
    return est;
}

RadialFunction bubble(std::shared_ptr<const RadialGrid> g, double eps) {
    const int N = g->N;
    if (N < 3) throw DomainError("bubbles need N >= 3");
    const double k = 0.5 * (N - 2);
    return RadialFunction::sample(g, [&](double r) {
        if (r >= 2.0) return 0.0;
        const double x = std::tanh(0.5 * r);
        const double cut = r <= 1.0 ? 1.0 : 0.5 * (1.0 + std::cos(std::numbers::pi * (r - 1.0)));
        return cut * std::pow(0.5 * (1.0 - x * x), k) * std::pow(eps * eps + x * x, -k);
    });
}

ConcentrationEstimate estimate_mixed_constant(std::shared_ptr<const RadialGrid> g, double lambda, const QuadraticForms& f,
                                              const std::vector<double>& eps) {
    if (eps.size() < 5) throw DomainError("concentration fit needs at least five widths");
    ConcentrationEstimate est;
    est.eps = eps;
    // leading correction exponent: boundary/mass terms scale like eps^{N-2}, the seminorm like eps^{2-2s}
    const double a = std::min<double>(f.N - 2, 2.0 - 2.0 * f.s);
    Eigen::MatrixXd A(eps.size(), 4);
    Eigen::VectorXd b(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double e = eps[i];
        est.quotient.push_back(mixed_quotient(bubble(g, e), lambda, f));
        A(i, 0) = 1.0;
        A(i, 1) = std::pow(e, a);
        A(i, 2) = std::pow(e, a) * std::log(e);
        A(i, 3) = std::pow(e, std::min(2.0, a + 1.0));
        b[i] = est.quotient.back();
    }
    est.value = lsq(A, b)[0];
    return est;
}

}  // namespace hypfrac::funcspace
