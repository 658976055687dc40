#include "hypfrac/solver.hpp"
#include "hypfrac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hypfrac::solver {

std::string to_string(Mode m) { return m == Mode::subcritical ? "subcritical" : "critical"; }

Mode mode_from_string(const std::string& s) {
    if (s == "subcritical") return Mode::subcritical;
    if (s == "critical" || s == "critical_perturbed") return Mode::critical_perturbed;
    throw ValidationError("unknown mode '" + s + "' (expected subcritical or critical)");
}

void ProblemSpec::validate() const {
    if (N < 3) throw DomainError("N must be at least 3");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
    if (!(lambda < fs::spectral_bottom(N)))
        throw DomainError("lambda must be below (N-1)^2/4 = " + std::to_string(fs::spectral_bottom(N)));
    if (!(p > 1.0 && p < critical_exponent() - 1.0))
        throw DomainError("p must lie in (1, 2*-1) = (1, " + std::to_string(critical_exponent() - 1.0) + ")");
}

ThresholdFailure::ThresholdFailure(double sup, double thr)
    : std::runtime_error([&] {
          std::ostringstream os;
          os.precision(10);
          os << "threshold condition fails: sup J(zeta u0) = " << sup << " >= S^{N/2}/N = " << thr;
          return os.str();
      }()),
      sup_value(sup),
      threshold(thr) {}

// ---------------------------------------------------------------------------------------------

Functional::Functional(std::shared_ptr<const fs::RadialGrid> grid, const fs::QuadraticForms& forms, double lambda,
                       bool with_nonlocal, std::vector<Power> powers)
    : grid_(std::move(grid)), lambda_(lambda), powers_(std::move(powers)) {
    const Eigen::Index n = Eigen::Index(grid_->size());
    if (forms.grid_hash != grid_->hash() || forms.stiffness.rows() != n)
        throw ValidationError("forms were assembled on a different grid");
    if (!(lambda < fs::spectral_bottom(grid_->N)))
        throw DomainError("lambda must be below (N-1)^2/4 = " + std::to_string(fs::spectral_bottom(grid_->N)));
    const Eigen::MatrixXd A = forms.stiffness - lambda * forms.mass;
    B_ = with_nonlocal ? forms.nonlocal : Eigen::MatrixXd::Zero(n, n);
    Q_ = A + B_;
    const Eigen::Index m = n - 1;  // free nodes
    a_diag_ = A.diagonal().head(m);
    a_off_.resize(m - 1);
    for (Eigen::Index i = 0; i + 1 < m; ++i) a_off_[i] = A(i, i + 1);
    ldl_d_.resize(m);
    ldl_l_ = Eigen::VectorXd::Zero(m);
    ldl_d_[0] = a_diag_[0];
    for (Eigen::Index i = 1; i < m; ++i) {
        ldl_l_[i] = a_off_[i - 1] / ldl_d_[i - 1];
        ldl_d_[i] = a_diag_[i] - ldl_l_[i] * a_off_[i - 1];
    }
    for (Eigen::Index i = 0; i < m; ++i)
        if (!(ldl_d_[i] > 0.0)) throw DomainError("the lambda-form is not positive definite on this grid");
}

Functional Functional::energy_I(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                                const fs::QuadraticForms& forms) {
    return Functional(std::move(grid), forms, spec.lambda, true, {{spec.p + 1.0, 1.0}});
}

Functional Functional::energy_J(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                                const fs::QuadraticForms& forms) {
    return Functional(std::move(grid), forms, spec.lambda, true, {{spec.p + 1.0, 1.0}, {spec.critical_exponent(), 1.0}});
}

Functional Functional::for_mode(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                                const fs::QuadraticForms& forms) {
    return spec.mode == Mode::subcritical ? energy_I(spec, std::move(grid), forms) : energy_J(spec, std::move(grid), forms);
}

double Functional::power_integral(const Eigen::VectorXd& u, double q) const {
    const auto& w = grid_->weights;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) acc += std::pow(std::fabs(u[i]), q) * w[std::size_t(i)];
    return acc;
}

double Functional::quadratic(const Eigen::VectorXd& u) const { return u.dot(Q_ * u); }

double Functional::seminorm_sq(const Eigen::VectorXd& u) const { return u.dot(B_ * u); }

double Functional::norm_lambda_sq(const Eigen::VectorXd& u) const { return inner_lambda(u, u); }

double Functional::inner_lambda(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    const Eigen::Index m = a_diag_.size();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        acc += a_diag_[i] * u[i] * v[i];
        if (i + 1 < m) acc += a_off_[i] * (u[i] * v[i + 1] + u[i + 1] * v[i]);
    }
    return acc;
}

double Functional::energy(const Eigen::VectorXd& u) const {
    double e = 0.5 * quadratic(u);
    for (const auto& pw : powers_) e -= pw.coeff / pw.q * power_integral(u, pw.q);
    return e;
}

Eigen::VectorXd Functional::derivative(const Eigen::VectorXd& u) const {
    Eigen::VectorXd d = Q_ * u;
    const auto& w = grid_->weights;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::fabs(u[i]);
        if (a == 0.0) continue;
        for (const auto& pw : powers_) d[i] -= pw.coeff * w[std::size_t(i)] * std::pow(a, pw.q - 2.0) * u[i];
    }
    d[u.size() - 1] = 0.0;
    return d;
}

Eigen::MatrixXd Functional::hessian(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd H = Q_;
    const auto& w = grid_->weights;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::fabs(u[i]);
        if (a == 0.0) continue;
        for (const auto& pw : powers_) H(i, i) -= pw.coeff * (pw.q - 1.0) * w[std::size_t(i)] * std::pow(a, pw.q - 2.0);
    }
    return H;
}

double Functional::nehari_slope(const Eigen::VectorXd& u) const {
    double g = 2.0 * quadratic(u);
    for (const auto& pw : powers_) g -= pw.coeff * pw.q * power_integral(u, pw.q);
    return g;
}

Eigen::VectorXd Functional::riesz(const Eigen::VectorXd& d) const {
    const Eigen::Index m = a_diag_.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.size());
    for (Eigen::Index i = 0; i < m; ++i) x[i] = d[i] - (i > 0 ? ldl_l_[i] * x[i - 1] : 0.0);
    for (Eigen::Index i = 0; i < m; ++i) x[i] /= ldl_d_[i];
    for (Eigen::Index i = m - 2; i >= 0; --i) x[i] -= ldl_l_[i + 1] * x[i + 1];
    return x;
}

double Functional::dual_norm(const Eigen::VectorXd& d) const {
    Eigen::VectorXd dd = d;
    dd[dd.size() - 1] = 0.0;
    return std::sqrt(std::max(0.0, dd.dot(riesz(dd))));
}

// ---------------------------------------------------------------------------------------------

RayMax ray_maximum(const Functional& F, const Eigen::VectorXd& u) {
    const double a = F.quadratic(u);
    std::vector<double> b;
    double bsum = 0.0;
    for (const auto& pw : F.powers()) {
        b.push_back(pw.coeff * F.power_integral(u, pw.q));
        bsum += b.back();
    }
    if (!(a > 0.0) || !(bsum > 0.0)) {
        std::ostringstream os;
        os << "no interior maximum along the ray: quadratic part " << a << ", power part " << bsum;
        throw SolverError(os.str());
    }
    const auto& pws = F.powers();
    RayMax r;
    if (pws.size() == 1) {
        r.zeta = std::pow(a / b[0], 1.0 / (pws[0].q - 2.0));
    } else {
        // h(x) = a - sum b_k e^{(q_k-2) x} is strictly decreasing in x = log zeta
        auto h = [&](double x) {
            double v = a;
            for (std::size_t k = 0; k < pws.size(); ++k) v -= b[k] * std::exp((pws[k].q - 2.0) * x);
            return v;
        };
        double lo = 0.0, hi = 0.0;
        int guard = 0;
        if (h(0.0) > 0.0) {
            for (hi = 1.0; h(hi) > 0.0; hi *= 2.0)
                if (++guard > 60) throw SolverError("ray maximization: upper bracket not found");
            lo = hi / 2.0 < 1.0 ? 0.0 : hi / 2.0;
        } else {
            for (lo = -1.0; h(lo) <= 0.0; lo *= 2.0)
                if (++guard > 60) throw SolverError("ray maximization: lower bracket not found");
            hi = lo / 2.0 > -1.0 ? 0.0 : lo / 2.0;
        }
        for (int it = 0; it < 300; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi)) break;
            (h(mid) > 0.0 ? lo : hi) = mid;
        }
        // leftmost point where h vanishes to rounding
        r.zeta = std::exp(h(hi) == 0.0 ? hi : lo);
    }
    r.value = F.energy(r.zeta * u);
    return r;
}

double nehari_scale(const Functional& F, const Eigen::VectorXd& u) {
    if (u.cwiseAbs().maxCoeff() == 0.0) throw DomainError("Nehari scale of the zero function");
    double denom = 0.0;
    for (const auto& pw : F.powers()) denom += F.power_integral(u, pw.q);
    if (!(denom > 0.0)) throw DomainError("Nehari scale: vanishing power integral");
    return ray_maximum(F, u).zeta;
}

Eigen::VectorXd project(const Functional& F, const Eigen::VectorXd& u) { return nehari_scale(F, u) * u; }

// ---------------------------------------------------------------------------------------------

namespace {

Eigen::VectorXd rearranged_abs(const Functional& F, const Eigen::VectorXd& u) {
    fs::RadialFunction a(F.grid(), u.cwiseAbs());
    return fs::schwarz_rearrange(a).values;
}

IterationRecord record(const Functional& F, int it, const Eigen::VectorXd& u, double res) {
    return {it, F.energy(u), res, F.nehari_slope(u)};
}

}  // namespace

Eigen::VectorXd newton_polish(const Functional& F, const Eigen::VectorXd& u0, double target, int max_steps) {
    const Eigen::Index m = F.size() - 1;
    Eigen::VectorXd u = u0, best = u0;
    double best_res = F.residual(u0);
    for (int step = 0; step < max_steps && best_res > target; ++step) {
        const Eigen::VectorXd d = F.derivative(u);
        const Eigen::MatrixXd H = F.hessian(u);
        // symmetric diagonal scaling: the entries span many orders of magnitude through the volume weight
        Eigen::VectorXd sc = H.diagonal().head(m).cwiseAbs().cwiseSqrt().cwiseInverse();
        for (Eigen::Index i = 0; i < m; ++i)
            if (!std::isfinite(sc[i])) sc[i] = 1.0;
        const Eigen::MatrixXd Hs = sc.asDiagonal() * H.topLeftCorner(m, m) * sc.asDiagonal();
        const Eigen::VectorXd y = Hs.partialPivLu().solve(-sc.cwiseProduct(d.head(m)));
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(u.size());
        delta.head(m) = sc.cwiseProduct(y);
        if (!delta.allFinite()) break;
        bool accepted = false;
        for (double t = 1.0; t > 1e-4; t *= 0.5) {
            const Eigen::VectorXd v = u + t * delta;
            const double rv = F.residual(v);
            if (rv < best_res) {
                u = v;
                best = v;
                best_res = rv;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return best;
}

DescentResult minimize_on_nehari(const Functional& F, const fs::RadialFunction& init, const SolverOptions& opt) {
    if (init.grid->hash() != F.grid()->hash()) throw ValidationError("initial guess lives on a different grid");
    Eigen::VectorXd u = init.values.cwiseAbs();
    u[u.size() - 1] = 0.0;
    if (u.maxCoeff() == 0.0) throw DomainError("initial guess has no nonzero part");
    u = project(F, rearranged_abs(F, u));
    double E = F.energy(u);
    DescentResult out;
    double alpha = 1.0;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        const Eigen::VectorXd d = F.derivative(u);
        const Eigen::VectorXd g = F.riesz(d);
        const double res = std::sqrt(std::max(0.0, d.dot(g)));
        out.history.push_back(record(F, it, u, res));
        if (res < opt.newton_switch * std::sqrt(F.norm_lambda_sq(u))) break;
        // Armijo on E(project(.)); the directional derivative along -g on the manifold is -res^2
        alpha = std::min(4.0, 2.0 * alpha);
        bool accepted = false;
        Eigen::VectorXd v;
        double Ev = 0.0;
        for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
            v = project(F, u - alpha * g);
            Ev = F.energy(v);
            if (Ev <= E - 1e-4 * alpha * res * res) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        u = v;
        E = Ev;
        if (opt.rearrange_every > 0 && (it + 1) % opt.rearrange_every == 0) {
            const Eigen::VectorXd w = project(F, rearranged_abs(F, u));
            const double Ew = F.energy(w);
            if (Ew <= E + 1e-13 * std::fabs(E)) {
                u = w;
                E = Ew;
            }
        }
    }
    const double nu = std::sqrt(F.norm_lambda_sq(u));
    u = newton_polish(F, u, 1e-3 * opt.tol * nu);
    u = project(F, u);
    out.iterations = it;
    out.residual = F.residual(u);
    out.level = F.energy(u);
    out.solution = fs::RadialFunction(F.grid(), u);
    const double nu2 = F.norm_lambda_sq(u);
    out.converged = out.residual < opt.tol * std::sqrt(nu2) && std::fabs(F.nehari_value(u)) < opt.tol * nu2;
    out.history.push_back(record(F, it, u, out.residual));
    return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

// Redistributes images first..last (inclusive) to equal lambda-arclength, endpoints fixed.
void reparametrize(const Functional& F, std::vector<Eigen::VectorXd>& img, std::size_t first, std::size_t last) {
    if (last <= first + 1) return;
    std::vector<double> L(last - first + 1, 0.0);
    for (std::size_t k = first + 1; k <= last; ++k)
        L[k - first] = L[k - first - 1] + std::sqrt(std::max(0.0, F.norm_lambda_sq(img[k] - img[k - 1])));
    const double total = L.back();
    if (!(total > 0.0)) return;
    std::vector<Eigen::VectorXd> old(img.begin() + std::ptrdiff_t(first), img.begin() + std::ptrdiff_t(last) + 1);
    std::size_t j = 0;
    for (std::size_t k = first + 1; k < last; ++k) {
        const double target = total * double(k - first) / double(last - first);
        while (j + 1 < old.size() - 1 && L[j + 1] < target) ++j;
        const double span = L[j + 1] - L[j];
        const double t = span > 0.0 ? (target - L[j]) / span : 0.0;
        img[k] = (1.0 - t) * old[j] + t * old[j + 1];
    }
}

double coercivity_margin(const Functional& F, const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
    const double p1 = F.powers().front().q;
    const double n2 = F.norm_lambda_sq(u);
    const double margin = F.energy(u) - d.dot(u) / p1 - (p1 - 2.0) / (2.0 * p1) * n2;
    return n2 > 0.0 ? margin / n2 : 0.0;
}

}  // namespace

PathResult mountain_pass(const Functional& F, const Eigen::VectorXd& endpoint, const SolverOptions& opt,
                         const std::vector<Eigen::VectorXd>& initial) {
    const std::size_t M = std::size_t(std::max(3, opt.path_nodes));
    if (!(F.energy(endpoint) < 0.0)) throw SolverError("mountain pass endpoint must have negative energy");
    std::vector<Eigen::VectorXd> img(M);
    img[0] = Eigen::VectorXd::Zero(endpoint.size());
    img[M - 1] = endpoint;
    if (initial.size() == M - 2) {
        for (std::size_t k = 1; k + 1 < M; ++k) img[k] = initial[k - 1];
    } else {
        for (std::size_t k = 1; k + 1 < M; ++k) img[k] = (double(k) / double(M - 1)) * endpoint;
    }
    reparametrize(F, img, 0, M - 1);

    PathResult out;
    out.min_coercivity_margin = std::numeric_limits<double>::infinity();
    const double alpha = 0.25;
    std::vector<double> E(M, 0.0);
    std::vector<Eigen::VectorXd> D(M);
    int it = 0;
    for (; it < opt.path_max_iter; ++it) {
        for (std::size_t k = 0; k < M; ++k) {
            E[k] = F.energy(img[k]);
            D[k] = F.derivative(img[k]);
            if (k > 0) out.min_coercivity_margin = std::min(out.min_coercivity_margin, coercivity_margin(F, img[k], D[k]));
        }
        const std::size_t top = std::size_t(std::max_element(E.begin() + 1, E.end() - 1) - E.begin());
        const double res = F.dual_norm(D[top]);
        out.history.push_back({it, E[top], res, F.nehari_slope(img[top])});
        if (res < opt.newton_switch * std::sqrt(F.norm_lambda_sq(img[top]))) {
            out.converged = true;
            break;
        }
        // far images sit where E is steep and unbounded below; cap each move at a quarter segment
        double length = 0.0;
        for (std::size_t k = 1; k < M; ++k) length += std::sqrt(std::max(0.0, F.norm_lambda_sq(img[k] - img[k - 1])));
        const double max_step = 0.25 * length / double(M - 1);
        for (std::size_t k = 1; k + 1 < M; ++k) {
            Eigen::VectorXd g = F.riesz(D[k]);
            if (k == top) {
                Eigen::VectorXd tau = img[k + 1] - img[k - 1];
                const double tn = std::sqrt(F.norm_lambda_sq(tau));
                if (tn > 0.0) {
                    tau /= tn;
                    g -= 2.0 * F.inner_lambda(g, tau) * tau;
                }
            }
            const double step = alpha * std::sqrt(std::max(0.0, F.norm_lambda_sq(g)));
            img[k] -= (step > max_step ? alpha * max_step / step : alpha) * g;
        }
        reparametrize(F, img, 0, top);
        reparametrize(F, img, top, M - 1);
    }
    for (std::size_t k = 0; k < M; ++k) E[k] = F.energy(img[k]);
    out.top = std::size_t(std::max_element(E.begin() + 1, E.end() - 1) - E.begin());
    out.level = E[out.top];
    out.residual = F.residual(img[out.top]);
    out.iterations = it;
    out.energies = E;
    out.images = std::move(img);
    return out;
}

// ---------------------------------------------------------------------------------------------

double discrete_sobolev_constant(std::shared_ptr<const fs::RadialGrid> grid, const fs::QuadraticForms& forms,
                                 double lambda, double q, const SolverOptions& opt) {
    Functional F(grid, forms, lambda, false, {{q, 1.0}});
    const auto init = fs::RadialFunction::sample(grid, [](double r) { return std::exp(-r * r); });
    const auto res = minimize_on_nehari(F, init, opt);
    // on the Nehari manifold E = (1/2 - 1/q) S^{q/(q-2)}
    return std::pow(res.level / (0.5 - 1.0 / q), (q - 2.0) / q);
}

MountainGeometry subcritical_geometry(double p, double S_p) {
    MountainGeometry g;
    g.radius = std::pow((p + 1.0) / 4.0 * std::pow(S_p, 0.5 * (p + 1.0)), 1.0 / (p - 1.0));
    g.beta = 0.25 * std::pow((p + 1.0) * std::pow(S_p, 0.5 * (p + 1.0)) / 4.0, 2.0 / (p - 1.0));
    return g;
}

MountainGeometry critical_geometry(double p, double two_star, double S_p, double S_c) {
    const double cp = std::pow(S_p, -0.5 * (p + 1.0)) / (p + 1.0);
    const double cc = std::pow(S_c, -0.5 * two_star) / two_star;
    auto f = [&](double r) { return 0.5 * r * r - cp * std::pow(r, p + 1.0) - cc * std::pow(r, two_star); };
    // f'(r)/r = 1 - (p+1) cp r^{p-1} - 2* cc r^{2*-2} is decreasing; bisect its root
    auto fp = [&](double r) {
        return 1.0 - (p + 1.0) * cp * std::pow(r, p - 1.0) - two_star * cc * std::pow(r, two_star - 2.0);
    };
    double lo = 0.0, hi = 1.0;
    while (fp(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fp(mid) > 0.0 ? lo : hi) = mid;
    }
    return {f(lo), lo};
}

bool SolveReport::all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

// ---------------------------------------------------------------------------------------------

namespace {

void check_spec_mode(const ProblemSpec& spec, Mode m) {
    if (spec.mode != m) throw DomainError("operation requires mode " + to_string(m));
}

Functional functional_for(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& f, Mode m) {
    check_spec_mode(spec, m);
    return m == Mode::subcritical ? Functional::energy_I(spec, u.grid, f) : Functional::energy_J(spec, u.grid, f);
}

}  // namespace

double energy_I(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms) {
    return functional_for(u, spec, forms, Mode::subcritical).energy(u.values);
}

fs::RadialFunction gradient_I(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms) {
    const auto F = functional_for(u, spec, forms, Mode::subcritical);
    return fs::RadialFunction(u.grid, F.riesz(F.derivative(u.values)));
}

double energy_J(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms) {
    return functional_for(u, spec, forms, Mode::critical_perturbed).energy(u.values);
}

fs::RadialFunction gradient_J(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms) {
    const auto F = functional_for(u, spec, forms, Mode::critical_perturbed);
    return fs::RadialFunction(u.grid, F.riesz(F.derivative(u.values)));
}

double nehari_scale(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms) {
    return nehari_scale(Functional::for_mode(spec, u.grid, forms), u.values);
}

fs::RadialFunction project(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms) {
    return fs::RadialFunction(u.grid, project(Functional::for_mode(spec, u.grid, forms), u.values));
}

fs::RadialFunction default_initial(std::shared_ptr<const fs::RadialGrid> grid) {
    return fs::RadialFunction::sample(std::move(grid), [](double r) { return std::exp(-r * r); });
}

bool is_nonincreasing(const fs::RadialFunction& u, double tol) {
    const double scale = u.values.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 1; i < u.values.size(); ++i)
        if (u.values[i] > u.values[i - 1] + tol * scale) return false;
    return true;
}

MaxPrincipleCheck weak_max_check(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms,
                                 double tol) {
    const auto F = Functional::for_mode(spec, u.grid, forms);
    MaxPrincipleCheck c;
    c.min_value = u.values.minCoeff();
    c.max_value = u.values.maxCoeff();
    const Eigen::VectorXd neg = (-u.values).cwiseMax(0.0);
    c.negative_norm = std::sqrt(std::max(0.0, F.norm_lambda_sq(neg)));
    c.negative_seminorm = std::sqrt(std::max(0.0, F.seminorm_sq(neg)));
    const double scale = std::sqrt(std::max(0.0, F.norm_lambda_sq(u.values)));
    c.passes = c.min_value >= -1e-8 * std::max(c.max_value, 0.0) && c.negative_norm <= tol * scale &&
               c.negative_seminorm <= tol * scale && c.max_value > 0.0;
    return c;
}

// ---------------------------------------------------------------------------------------------

SolveReport solve_subcritical(const ProblemSpec& spec, const fs::QuadraticForms& forms, const fs::RadialFunction& init,
                              const SolverOptions& opt) {
    spec.validate();
    check_spec_mode(spec, Mode::subcritical);
    const auto F = Functional::energy_I(spec, init.grid, forms);
    auto desc = minimize_on_nehari(F, init, opt);
    const Eigen::VectorXd& u = desc.solution.values;

    SolveReport rep;
    rep.solution = desc.solution;
    rep.energy = F.energy(u);
    rep.nehari_value = F.nehari_value(u);
    rep.residual = desc.residual;
    rep.c_star = rep.energy;
    rep.iterations = desc.iterations;
    rep.converged = desc.converged;
    rep.history = std::move(desc.history);
    rep.threshold = std::numeric_limits<double>::quiet_NaN();

    const double Sp = discrete_sobolev_constant(init.grid, forms, spec.lambda, spec.p + 1.0, opt);
    const auto geo = subcritical_geometry(spec.p, Sp);
    rep.beta = geo.beta;
    rep.mp_radius = geo.radius;

    const double nu = std::sqrt(F.norm_lambda_sq(u));
    const double lp = F.power_integral(u, spec.p + 1.0);
    const double identity = std::fabs(rep.energy - (0.5 - 1.0 / (spec.p + 1.0)) * lp) / std::fabs(rep.energy);
    const auto wm = weak_max_check(rep.solution, spec, forms, opt.tol);
    rep.checks.emplace_back("converged", rep.converged);
    rep.checks.emplace_back("residual < tol * ||u||_lambda", rep.residual < opt.tol * nu);
    rep.checks.emplace_back("u >= -1e-8 max u", u.minCoeff() >= -1e-8 * u.maxCoeff());
    rep.checks.emplace_back("profile nonincreasing", is_nonincreasing(rep.solution, 1e-12));
    rep.checks.emplace_back("energy identity on the Nehari manifold (1e-8)", identity < 1e-8);
    rep.checks.emplace_back("weak maximum principle", wm.passes);
    rep.checks.emplace_back("c* >= beta", rep.c_star >= rep.beta);

    const auto mp = mountain_pass_level_subcritical(spec, forms, rep.solution, opt);
    rep.mp_level_m = mp.level;
    rep.checks.emplace_back("path minimax converged", mp.converged);
    rep.checks.emplace_back("c > 0", mp.level > 0.0);
    rep.checks.emplace_back("c >= beta", mp.level >= rep.beta);
    rep.checks.emplace_back("|c - c*| < 1% c*", std::fabs(mp.level - rep.c_star) < 0.01 * rep.c_star);
    return rep;
}

MountainPassCheck mountain_pass_level_subcritical(const ProblemSpec& spec, const fs::QuadraticForms& forms,
                                                  const fs::RadialFunction& solution, const SolverOptions& opt) {
    const auto F = Functional::energy_I(spec, solution.grid, forms);
    const Eigen::VectorXd& u = solution.values;
    MountainPassCheck out;
    double T = 2.0;
    while (!(F.energy(T * u) < 0.0)) {
        T *= 2.0;
        if (T > 1e12) throw SolverError("mountain pass: the path t T u never reaches negative energy");
    }
    out.T = T;
    // perturbed segment: t T u + sin(pi t) v with a broad bump v, ||v||_lambda = ||u||_lambda / 2
    Eigen::VectorXd v = fs::RadialFunction::sample(solution.grid, [](double r) { return std::exp(-0.25 * r * r); }).values;
    v *= 0.5 * std::sqrt(F.norm_lambda_sq(u) / F.norm_lambda_sq(v));
    const std::size_t M = std::size_t(std::max(3, opt.path_nodes));
    std::vector<Eigen::VectorXd> init;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < M; ++k) {
        const double t = double(k) / double(M - 1);
        init.push_back(t * T * u + std::sin(std::numbers::pi * t) * v);
        top = std::max(top, F.energy(init.back()));
    }
    out.initial_level = top;
    const auto path = mountain_pass(F, T * u, opt, init);
    out.level = path.level;
    out.converged = path.converged;
    out.iterations = path.iterations;
    return out;
}

// ---------------------------------------------------------------------------------------------

double threshold_from_constant(int N, double S) { return std::pow(S, 0.5 * N) / N; }

ThresholdCheck check_threshold(const fs::RadialFunction& u0, const ProblemSpec& spec, const fs::QuadraticForms& forms,
                               double S_mixed) {
    if (u0.values.maxCoeff() <= 0.0) throw DomainError("u0 must have a positive part");
    if (u0.values.minCoeff() < 0.0) throw DomainError("u0 must be nonnegative");
    ProblemSpec js = spec;
    js.mode = Mode::critical_perturbed;
    const auto F = Functional::energy_J(js, u0.grid, forms);
    const auto rm = ray_maximum(F, u0.values);
    ThresholdCheck c;
    c.sup_value = rm.value;
    c.zeta = rm.zeta;
    c.threshold = threshold_from_constant(spec.N, S_mixed);
    c.passes = c.sup_value < c.threshold;
    return c;
}

ThresholdSearch search_threshold_profiles(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                                          const fs::QuadraticForms& forms, double S_mixed) {
    ThresholdSearch out;
    std::vector<fs::RadialFunction> profiles;
    for (int i = 0; i < 24; ++i) {
        const double a = 0.02 * std::pow(250.0, i / 23.0);
        profiles.push_back(fs::RadialFunction::sample(grid, [a](double r) { return std::exp(-(r / a) * (r / a)); }));
        std::ostringstream os;
        os << "gaussian a=" << a;
        out.labels.push_back(os.str());
    }
    for (int j = 0; j < 12; ++j) {
        const double eps = 0.01 * std::pow(100.0, j / 11.0);
        profiles.push_back(fs::bubble(grid, eps));
        std::ostringstream os;
        os << "bubble eps=" << eps;
        out.labels.push_back(os.str());
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        out.checks.push_back(check_threshold(profiles[k], spec, forms, S_mixed));
        const double ratio = out.checks.back().sup_value / out.checks.back().threshold;
        if (ratio < best) {
            best = ratio;
            out.best = std::ptrdiff_t(k);
        }
        if (out.first_passing < 0 && out.checks.back().passes) out.first_passing = std::ptrdiff_t(k);
    }
    out.best_profile = profiles[std::size_t(out.best)];
    return out;
}

SolveReport solve_critical(const ProblemSpec& spec, const fs::QuadraticForms& forms, const fs::RadialFunction& u0,
                           double S_mixed, const SolverOptions& opt) {
    spec.validate();
    check_spec_mode(spec, Mode::critical_perturbed);
    const auto thr = check_threshold(u0, spec, forms, S_mixed);
    if (!thr.passes) throw ThresholdFailure(thr.sup_value, thr.threshold);
    const auto F = Functional::energy_J(spec, u0.grid, forms);

    SolveReport rep;
    rep.threshold = thr.threshold;
    const double Sp = discrete_sobolev_constant(u0.grid, forms, spec.lambda, spec.p + 1.0, opt);
    const double Sc = discrete_sobolev_constant(u0.grid, forms, spec.lambda, spec.critical_exponent(), opt);
    const auto geo = critical_geometry(spec.p, spec.critical_exponent(), Sp, Sc);
    rep.beta = geo.beta;
    rep.mp_radius = geo.radius;

    // e = zeta0 u0 beyond the ray maximum with J(e) < 0 and ||e||_lambda > rho
    double zeta0 = 2.0 * thr.zeta;
    const double n0 = std::sqrt(F.norm_lambda_sq(u0.values));
    while (!(F.energy(zeta0 * u0.values) < 0.0) || zeta0 * n0 <= geo.radius) {
        zeta0 *= 2.0;
        if (zeta0 > 1e12 * thr.zeta) throw SolverError("mountain pass: no endpoint with negative energy");
    }
    const auto path = mountain_pass(F, zeta0 * u0.values, opt);
    rep.mp_level_m = path.level;
    Eigen::VectorXd u = path.images[path.top];
    const double nu0 = std::sqrt(F.norm_lambda_sq(u));
    u = newton_polish(F, u, 1e-3 * opt.tol * nu0);

    rep.solution = fs::RadialFunction(u0.grid, u);
    rep.energy = F.energy(u);
    rep.nehari_value = F.nehari_value(u);
    rep.residual = F.residual(u);
    rep.iterations = path.iterations;
    rep.history = path.history;
    const double nu = std::sqrt(F.norm_lambda_sq(u));
    rep.converged = path.converged && rep.residual < opt.tol * nu && std::fabs(rep.nehari_value) < opt.tol * nu * nu;

    // independent level: minimize J over its Nehari-type set (ray maxima)
    const auto neh = minimize_on_nehari(F, u0, opt);
    rep.c_star = neh.level;

    const auto wm = weak_max_check(rep.solution, spec, forms, opt.tol);
    rep.checks.emplace_back("converged", rep.converged);
    rep.checks.emplace_back("residual < tol * ||u||_lambda", rep.residual < opt.tol * nu);
    rep.checks.emplace_back("beta <= m", rep.beta <= rep.mp_level_m);
    rep.checks.emplace_back("m < S^{N/2}/N", rep.mp_level_m < rep.threshold);
    rep.checks.emplace_back("||u_inf||_lambda > 0.01 ||u0||_lambda", nu > 0.01 * n0);
    rep.checks.emplace_back("polished energy within 1% of m", std::fabs(rep.energy - rep.mp_level_m) < 0.01 * rep.mp_level_m);
    rep.checks.emplace_back("Nehari-type level within 2% of m", std::fabs(neh.level - rep.mp_level_m) < 0.02 * rep.mp_level_m);
    rep.checks.emplace_back("coercivity along the path", path.min_coercivity_margin >= -1e-12);
    rep.checks.emplace_back("weak maximum principle", wm.passes);
    if (rep.threshold - rep.mp_level_m < 1e-3 * rep.threshold)
        rep.warnings.push_back("minimax level within 1e-3 of the compactness threshold");
    return rep;
}

}  // namespace hypfrac::solver
