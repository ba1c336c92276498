#pragma once

#include <Eigen/Core>

#include "omfisher/params.hpp"

namespace omfisher {

// Internally (dq, dp) are measured in zero-point units x_zpf = sqrt(hbar/(2 m w_m))
// and p_zpf = sqrt(hbar m w_m / 2); optical quadratures are already
// dimensionless. `si` and `scaled` are related by S = diag(x_zpf, p_zpf, 1, 1):
// A_si = S A_scaled S^-1, and for D and sigma: M_si = S M_scaled S.
struct DriftMatrix {
  Eigen::Matrix4d si = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d scaled = Eigen::Matrix4d::Zero();
  double x_zpf = 1.0;
  double p_zpf = 1.0;

  // Wrap an already dimensionless matrix (unit scales).
  static DriftMatrix from_scaled(const Eigen::Matrix4d& a);
};

struct DiffusionMatrix {
  Eigen::Matrix4d si = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d scaled = Eigen::Matrix4d::Zero();
  double abs_error = 0.0;  // max-abs quadrature error, scaled units
  int evaluations = 0;

  static DiffusionMatrix from_scaled(const Eigen::Matrix4d& d, const DriftMatrix& a);
};

struct CovarianceMatrix4 {
  Eigen::Matrix4d si = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d scaled = Eigen::Matrix4d::Zero();
  double residual = 0.0;  // ||A s + s A^T + D||_F / ||D||_F in scaled units

  Eigen::Matrix2d optical() const { return scaled.block<2, 2>(2, 2); }
};

DriftMatrix drift_matrix(const SystemParams& p, const SteadyState& ss);
DriftMatrix drift_matrix(const SystemParams& p, double alpha, double delta_eff);

// dA/dg (scaled) at fixed power, including the steady-state response.
Eigen::Matrix4d drift_derivative(const SystemParams& p, const SteadyState& ss);

bool is_stable(const DriftMatrix& a);

// Scaling and squaring with a Pade approximant.
Eigen::Matrix4d matrix_exponential(const Eigen::Matrix4d& m);

struct DiffusionOptions {
  double rel_tol = 1e-11;
  int max_panels = 6000;
  double kernel_scale = 1.0;  // multiplies the Brownian kernel; 0 removes it
};

// D = diag(0, 0, kappa/2, kappa/2) plus the Brownian block
// (hbar/p_zpf^2)(e_p w^T + w e_p^T), w = int_0^inf D_R(t) exp(A t) e_p dt,
// evaluated through its frequency representation
// w = int_0^inf J(w) coth(hbar w / 2 kB T) [-A (A^2 + w^2)^-1] e_p dw.
DiffusionMatrix diffusion_matrix(const SystemParams& p, const DriftMatrix& a,
                                 const DiffusionOptions& opt = {});

// dD/dg for a drift derivative da (scaled units).
DiffusionMatrix diffusion_derivative(const SystemParams& p, const DriftMatrix& a,
                                     const Eigen::Matrix4d& da, const DiffusionOptions& opt = {});

// Solve A X + X A^T = -Q through the 16x16 Kronecker system. Throws
// DegeneracyError when an eigenvalue pair of A sums to zero.
Eigen::Matrix4d solve_lyapunov(const Eigen::Matrix4d& a, const Eigen::Matrix4d& q,
                               double* residual = nullptr);

CovarianceMatrix4 stationary_covariance(const DriftMatrix& a, const DiffusionMatrix& d);

}  // namespace omfisher
