#pragma once

#include "hypfrac/funcspace.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace hypfrac::solver {

namespace fs = funcspace;

enum class Mode { subcritical, critical_perturbed };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);  // throws ValidationError

struct ProblemSpec {
    int N = 3;
    double s = 0.5;
    double lambda = 0.0;
    double p = 3.0;
    Mode mode = Mode::subcritical;

    double critical_exponent() const { return 2.0 * N / (N - 2.0); }
    void validate() const;  // throws DomainError when a parameter is out of range
};

// E(u) = 1/2 u^T Q u - sum_k c_k / q_k int |u|^{q_k}, with Q = K - lambda M (+ nonlocal).
// Vectors carry every node; the last (Dirichlet) entry is kept at zero.
class Functional {
public:
    struct Power {
        double q;
        double coeff;
    };

    Functional(std::shared_ptr<const fs::RadialGrid> grid, const fs::QuadraticForms& forms, double lambda,
               bool with_nonlocal, std::vector<Power> powers);
    static Functional energy_I(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                               const fs::QuadraticForms& forms);
    static Functional energy_J(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                               const fs::QuadraticForms& forms);
    static Functional for_mode(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                               const fs::QuadraticForms& forms);

    const std::shared_ptr<const fs::RadialGrid>& grid() const { return grid_; }
    Eigen::Index size() const { return Eigen::Index(grid_->size()); }
    const std::vector<Power>& powers() const { return powers_; }

    double energy(const Eigen::VectorXd& u) const;
    Eigen::VectorXd derivative(const Eigen::VectorXd& u) const;  // E'(u) as a dual vector
    Eigen::VectorXd riesz(const Eigen::VectorXd& d) const;       // A^{-1} d, A = K - lambda M
    double dual_norm(const Eigen::VectorXd& d) const;            // sqrt(d^T A^{-1} d)
    double residual(const Eigen::VectorXd& u) const { return dual_norm(derivative(u)); }
    Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const;

    double quadratic(const Eigen::VectorXd& u) const;  // u^T Q u
    double norm_lambda_sq(const Eigen::VectorXd& u) const;
    double inner_lambda(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    double seminorm_sq(const Eigen::VectorXd& u) const;
    double power_integral(const Eigen::VectorXd& u, double q) const;  // sum w_i |u_i|^q
    double nehari_value(const Eigen::VectorXd& u) const { return derivative(u).dot(u); }
    // d/dt E'(tu)[tu] at t = 1, i.e. G'(u)[u] for G(u) = E'(u)[u]
    double nehari_slope(const Eigen::VectorXd& u) const;

private:
    std::shared_ptr<const fs::RadialGrid> grid_;
    Eigen::MatrixXd Q_, B_;
    Eigen::VectorXd a_diag_, a_off_, ldl_d_, ldl_l_;  // tridiagonal A on the free nodes and its LDL^T
    double lambda_;
    std::vector<Power> powers_;
};

struct RayMax {
    double zeta = 0.0;
    double value = 0.0;
};
// max over zeta >= 0 of E(zeta u); unique by monotonicity of E'(zeta u)[u] / zeta.
// Throws SolverError with the bracket if no interior maximum exists.
RayMax ray_maximum(const Functional& F, const Eigen::VectorXd& u);

// Nehari scale: closed form for a single power, ray maximizer otherwise.
double nehari_scale(const Functional& F, const Eigen::VectorXd& u);
Eigen::VectorXd project(const Functional& F, const Eigen::VectorXd& u);

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThresholdFailure : std::runtime_error {
    double sup_value, threshold;
    ThresholdFailure(double sup, double thr);
};

struct SolverOptions {
    double tol = 1e-6;           // residual relative to ||u||_lambda
    int max_iter = 4000;         // Nehari descent iterations
    int rearrange_every = 5;     // |.|, rearrangement and projection every K iterations
    double newton_switch = 1e-4; // relative residual at which Newton takes over
    int path_nodes = 32;
    int path_max_iter = 6000;
};

struct IterationRecord {
    int iteration = 0;
    double energy = 0.0;
    double residual = 0.0;
    double nehari_slope = 0.0;
};

struct DescentResult {
    fs::RadialFunction solution;
    double level = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> history;
};

// Minimizes E on its Nehari manifold by projected gradient descent with Armijo backtracking,
// followed by Newton polishing on the critical-point equation.
DescentResult minimize_on_nehari(const Functional& F, const fs::RadialFunction& init, const SolverOptions& opt = {});

struct PathResult {
    std::vector<Eigen::VectorXd> images;
    std::vector<double> energies;
    double level = 0.0;         // max of E along the converged path
    std::size_t top = 0;        // index of the climbing image
    double residual = 0.0;      // dual-norm residual of the climbing image
    int iterations = 0;
    bool converged = false;
    double min_coercivity_margin = 0.0;  // min over images of E - E'[u]u/(p+1) - (p-1)/(2(p+1))||u||^2
    std::vector<IterationRecord> history;
};

// String method with a climbing image on paths from 0 to `endpoint`; initial interior images
// may be supplied (default: the straight segment).
PathResult mountain_pass(const Functional& F, const Eigen::VectorXd& endpoint, const SolverOptions& opt = {},
                         const std::vector<Eigen::VectorXd>& initial = {});

// Newton iteration on E'(u) = 0; returns the best iterate found.
Eigen::VectorXd newton_polish(const Functional& F, const Eigen::VectorXd& u, double target, int max_steps = 30);

// Discrete best constant inf ||u||_lambda^2 / ||u||_q^2 on the grid, by Nehari descent.
double discrete_sobolev_constant(std::shared_ptr<const fs::RadialGrid> grid, const fs::QuadraticForms& forms,
                                 double lambda, double q, const SolverOptions& opt = {});

// Lower bound for I along the sphere ||u||_lambda = r from the Sobolev inequality
struct MountainGeometry {
    double beta = 0.0;
    double radius = 0.0;
};
MountainGeometry subcritical_geometry(double p, double S_p);
// max over rho of 1/2 rho^2 - S_p^{-(p+1)/2} rho^{p+1}/(p+1) - S_c^{-2*/2} rho^{2*}/2*
MountainGeometry critical_geometry(double p, double two_star, double S_p, double S_c);

struct SolveReport {
    fs::RadialFunction solution;
    double energy = 0.0;
    double nehari_value = 0.0;
    double residual = 0.0;
    double c_star = 0.0;
    double mp_level_m = 0.0;
    double beta = 0.0;
    double mp_radius = 0.0;
    double threshold = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> history;
    std::vector<std::pair<std::string, bool>> checks;  // per-run invariants
    std::vector<std::string> warnings;
    bool all_checks_pass() const;
};

double energy_I(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms);
fs::RadialFunction gradient_I(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms);
double energy_J(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms);
fs::RadialFunction gradient_J(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms);
double nehari_scale(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms);
fs::RadialFunction project(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms);

// default initial guess: exp(-r^2) projected onto the Nehari manifold of I
fs::RadialFunction default_initial(std::shared_ptr<const fs::RadialGrid> grid);

SolveReport solve_subcritical(const ProblemSpec& spec, const fs::QuadraticForms& forms, const fs::RadialFunction& init,
                              const SolverOptions& opt = {});

struct MountainPassCheck {
    double level = 0.0;
    double initial_level = 0.0;  // max along the perturbed starting path
    double T = 0.0;              // endpoint T u with I(T u) < 0
    bool converged = false;
    int iterations = 0;
};
// Path minimax from 0 to T u through a perturbed segment; T doubles until I(T u) < 0.
MountainPassCheck mountain_pass_level_subcritical(const ProblemSpec& spec, const fs::QuadraticForms& forms,
                                                  const fs::RadialFunction& solution, const SolverOptions& opt = {});

struct ThresholdCheck {
    double sup_value = 0.0;
    double zeta = 0.0;
    double threshold = 0.0;
    bool passes = false;
};
double threshold_from_constant(int N, double S);  // S^{N/2} / N
ThresholdCheck check_threshold(const fs::RadialFunction& u0, const ProblemSpec& spec, const fs::QuadraticForms& forms,
                               double S_mixed);

// Gaussian bumps exp(-(r/a)^2) and conformal bubbles over a fixed width sweep
struct ThresholdSearch {
    std::vector<std::string> labels;
    std::vector<ThresholdCheck> checks;
    std::ptrdiff_t best = -1;  // smallest sup_value / threshold
    std::ptrdiff_t first_passing = -1;
    fs::RadialFunction best_profile;
};
ThresholdSearch search_threshold_profiles(const ProblemSpec& spec, std::shared_ptr<const fs::RadialGrid> grid,
                                          const fs::QuadraticForms& forms, double S_mixed);

// Requires check_threshold to pass for u0, otherwise throws ThresholdFailure.
SolveReport solve_critical(const ProblemSpec& spec, const fs::QuadraticForms& forms, const fs::RadialFunction& u0,
                           double S_mixed, const SolverOptions& opt = {});

struct MaxPrincipleCheck {
    bool passes = false;
    double min_value = 0.0;
    double max_value = 0.0;
    double negative_norm = 0.0;       // ||u^-||_lambda
    double negative_seminorm = 0.0;   // [u^-]_s
};
MaxPrincipleCheck weak_max_check(const fs::RadialFunction& u, const ProblemSpec& spec, const fs::QuadraticForms& forms,
                                 double tol = 1e-6);

bool is_nonincreasing(const fs::RadialFunction& u, double tol = 0.0);

}  // namespace hypfrac::solver
