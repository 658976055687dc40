#pragma once

#include "hypfrac/reduced_kernel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace hypfrac::funcspace {

// graded: step grows by `growth` from h_min, stays uniform up to r_mid, then grows by
// outer_growth towards R_max; geometric: the same without the outer segment; uniform: constant step.
enum class Spacing { graded, geometric, uniform };

struct GridOptions {
    double R_max = 20.0;
    std::size_t node_count = 400;
    Spacing spacing = Spacing::graded;
    double h_min = 1e-3;
    double growth = 1.1;
    double r_mid = 5.0;
    double outer_growth = 1.02;
};

// Nodes on [0, R_max]; the last node carries the homogeneous Dirichlet condition.
// weights[i] = int phi_i dV, positive for every node; the L^q integrals use them as lumped weights.
struct RadialGrid {
    int N = 3;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> element_volume;  // hyperbolic volume of each shell [r_i, r_{i+1}]

    std::size_t size() const { return nodes.size(); }
    double R_max() const { return nodes.back(); }
    std::uint64_t hash() const;  // FNV-1a over N and the node bits
};

// the defaults are tuned for 400 nodes; h_min and the growth excesses scale with 400 / node_count
GridOptions scaled_grid_options(double R_max, std::size_t node_count, Spacing spacing = Spacing::graded);
Spacing spacing_from_string(const std::string& s);  // throws ValidationError
std::string to_string(Spacing s);

RadialGrid make_grid(int N, const GridOptions& opt = {});
RadialGrid make_grid(int N, std::vector<double> nodes);

struct RadialFunction {
    std::shared_ptr<const RadialGrid> grid;
    Eigen::VectorXd values;

    RadialFunction() = default;
    RadialFunction(std::shared_ptr<const RadialGrid> g, Eigen::VectorXd v);
    // samples f at the nodes and zeroes the Dirichlet node
    static RadialFunction sample(std::shared_ptr<const RadialGrid> g, const std::function<double(double)>& f);

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    double operator()(double r) const;  // piecewise-linear interpolant, 0 beyond R_max
};

void write_csv(std::ostream& os, const RadialFunction& u);
RadialFunction read_csv(std::istream& is, std::shared_ptr<const RadialGrid> g);

// mass is the consistent P1 mass matrix; nonlocal = nonlocal_interior + nonlocal_tail
struct QuadraticForms {
    int N = 3;
    double s = 0.5;
    std::uint64_t grid_hash = 0;
    Eigen::MatrixXd stiffness;
    Eigen::MatrixXd mass;
    Eigen::MatrixXd nonlocal;
    Eigen::MatrixXd nonlocal_interior;  // pairs with both radii below R_max
    Eigen::MatrixXd nonlocal_tail;      // 2 int u^2(r1) int_{R_max}^inf W(r1,r2) dr2 dr1
};

QuadraticForms assemble_forms(const RadialGrid& grid, const kernel::PairKernel& pk, const kernel::ReducedKernel& rk);
QuadraticForms assemble_forms(const RadialGrid& grid, double s);
// stiffness and mass only; the nonlocal matrices are zero
QuadraticForms assemble_local_forms(const RadialGrid& grid);

void check_forms(const RadialGrid& grid, const QuadraticForms& f);  // throws ValidationError on mismatch

double spectral_bottom(int N);  // (N-1)^2 / 4

double dirichlet_energy(const RadialFunction& u, const QuadraticForms& f);
double mass_form(const RadialFunction& u, const QuadraticForms& f);
double norm_lambda_sq(const RadialFunction& u, double lambda, const QuadraticForms& f);
double seminorm_s_sq(const RadialFunction& u, const QuadraticForms& f);
double lp_norm(const RadialFunction& u, double q);
double lp_integral(const RadialFunction& u, double q);  // sum |u_i|^q w_i

RadialFunction schwarz_rearrange(const RadialFunction& u);

double critical_exponent(int N);  // 2N/(N-2)
double sobolev_quotient(const RadialFunction& u, double lambda, double p, const QuadraticForms& f);
double mixed_quotient(const RadialFunction& u, double lambda, const QuadraticForms& f);

// Upper estimate of S_{lambda,p}: nested 1-D sweep over u = exp(-(r/a)^2) cosh(r)^{-b}.
struct SobolevEstimate {
    double value = 0.0;
    double width = 0.0;
    double decay = 0.0;
};
SobolevEstimate estimate_sobolev_constant(std::shared_ptr<const RadialGrid> g, double lambda, double p,
                                          const QuadraticForms& f);

// S_{lambda,s} by concentration: conformally transplanted Aubin-Talenti bubbles of width eps,
// quotient fitted as S + a eps + b eps log eps + c eps^2 and extrapolated to eps = 0.
struct ConcentrationEstimate {
    double value = 0.0;
    std::vector<double> eps;
    std::vector<double> quotient;
};
ConcentrationEstimate estimate_mixed_constant(std::shared_ptr<const RadialGrid> g, double lambda,
                                              const QuadraticForms& f, const std::vector<double>& eps);

// conformal bubble ((1-x^2)/2)^{(N-2)/2} (eps^2 + x^2)^{-(N-2)/2}, x = tanh(r/2),
// cut off smoothly on 1 <= r <= 2 (the uncut profile is not square integrable)
RadialFunction bubble(std::shared_ptr<const RadialGrid> g, double eps);

}  // namespace hypfrac::funcspace
