#pragma once

#include "hypfrac/kernel.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace hypfrac::kernel {

// Near-diagonal model c(r1,r2) |r1-r2|^{-exponent}, c = amplitude (sinh r1 sinh r2)^{(N-1)/2}.
struct DiagonalModel {
    int dim = 3;
    double amplitude = 0.0;
    double exponent = 2.0;  // 1 + 2s
    double c(double r1, double r2) const;
    double operator()(double r1, double r2) const;
};

DiagonalModel diagonal_model(int N, double s);

// Angularly reduced two-point kernel
//   W(r1,r2) = omega_{N-1} omega_{N-2} sinh^{N-1} r1 sinh^{N-1} r2 int_0^pi K_s(d) sin^{N-2} theta dtheta,
// so that [u]_s^2 = int int (u(r1)-u(r2))^2 W(r1,r2) dr1 dr2 for radial u.
class PairKernel {
public:
    // closed_form = false forces the angular route even for N = 3 (used as a cross-check)
    PairKernel(int N, double s, bool closed_form = true);

    double W(double r1, double r2) const;  // closed form for N = 3, angular quadrature otherwise
    double W_angular(double r1, double r2) const;
    double W_closed_form(double r1, double r2) const;  // N = 3 only

    // int_R^inf W(r1, r2) dr2 for r1 < R
    double tail(double r1, double R, double rel_tol = 1e-9) const;

    const DiagonalModel& model() const { return model_; }
    int dim() const { return N_; }
    double order() const { return s_; }

private:
    int N_;
    double s_;
    bool closed_;
    DiagonalModel model_;
    std::shared_ptr<const KernelInterpolant> interp_;
};

struct ReducedKernel {
    int dim = 0;
    double order = 0.0;
    std::vector<double> r_grid;
    Eigen::MatrixXd W;      // off-diagonal W(r_i, r_j); diagonal entries are 0 (singular)
    Eigen::MatrixXd ratio;  // W / model off the diagonal, 1 on it
    DiagonalModel diagonal_model;
};

ReducedKernel build_reduced_kernel(int N, double s, const std::vector<double>& r_grid);
ReducedKernel build_reduced_kernel(const PairKernel& pk, const std::vector<double>& r_grid);

}  // namespace hypfrac::kernel
