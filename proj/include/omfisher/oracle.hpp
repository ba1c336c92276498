#pragma once

// Brute-force validators, independent of the closed forms they check.

#include <functional>

#include <Eigen/Core>

#include "omfisher/dynamics.hpp"
#include "omfisher/params.hpp"

namespace omfisher::oracle {

// Density operator of a single-mode Gaussian state in the number basis
// |0>..|n_max>.
struct FockState {
  int n_max = 0;
  Eigen::MatrixXcd rho;
  double trace_deficit = 0.0;
};

// 80 for sqrt(det sigma) <= 3, else ceil(40 sqrt(det sigma)).
int default_n_max(const Eigen::Matrix2d& sigma);

// sigma = nbar S S^T with S a squeeze followed by a rotation; the thermal
// state with mean occupation nbar - 1/2 is squeezed and rotated in an
// enlarged basis and then truncated. n_max <= 0 picks default_n_max.
FockState gaussian_to_fock(const Eigen::Matrix2d& sigma, int n_max = 0);

// Quadrature covariance Re<{u_i, u_j}>/2 of a truncated state.
Eigen::Matrix2d fock_covariance(const FockState& s);

// Support-restricted SLD formula on the midpoint state.
double qfi_fock(const FockState& rho_minus, const FockState& rho_plus, double h);

struct FockQfi {
  double value = 0.0;
  double value_extended = 0.0;  // at n_max + 20
  int n_max = 0;
  double relative_change = 0.0;
};

// QFI of g -> sigma(g) at g, with the n_max -> n_max + 20 convergence test.
// Throws ConvergenceError when the relative change exceeds tol.
FockQfi qfi_fock_family(const std::function<Eigen::Matrix2d(double)>& sigma_of_g, double g, double h,
                        int n_max = 0, double tol = 1e-4);

using PdfAt = std::function<std::function<double(double)>(double g)>;

// int (d_g ln P)^2 P dk over center +- 8 sd, with a five-point stencil in g.
// Throws NumericalError if a pdf in the stencil is off normalisation by > 1e-8.
double cfi_numeric(const PdfAt& pdf_at, double g, double h, double center, double sd);

// Same, for the homodyne density of sigma_out(g) at (theta, eta).
double cfi_numeric_homodyne(const std::function<Eigen::Matrix2d(double)>& sigma_of_g, double g,
                            double theta, double eta, double h);

struct TransientOptions {
  double rel_tol = 1e-11;
  double tail_target = 1e-8;   // relative size of the neglected kernel tail
};

struct TransientResult {
  Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();      // t -> infinity, scaled units
  Eigen::Matrix4d diffusion = Eigen::Matrix4d::Zero();  // D(t1), scaled units
  double t1 = 0.0;
  long steps = 0;
};

// Integrates v' = A v, w' = D_R(t) v, sigma' = A sigma + sigma A^T + D(t)
// (Dormand-Prince 5(4)) up to t1, where the kernel tail is negligible, then
// propagates sigma to t -> infinity exactly with Van Loan block
// exponentials and interval doubling.
TransientResult transient_covariance(const SystemParams& p, const DriftMatrix& a,
                                     const TransientOptions& opt = {});

// max_ij |a_ij - b_ij| / sqrt(b_ii b_jj).
double covariance_distance(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b);

}  // namespace omfisher::oracle
