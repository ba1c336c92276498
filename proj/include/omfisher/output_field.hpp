#pragma once

#include <optional>

#include <Eigen/Core>

#include "omfisher/dynamics.hpp"

namespace omfisher {

// How the filtered vacuum input enters sigma_out.
enum class VacuumTerm {
  kIntegrated,  // (1/tau) int G G^T dt = I, the exact window average
  kPrinted,     // sinc(2 omega_k tau) I, the literal closed form
};

struct MeasurementSpec {
  double omega_k = 0.0;     // rad/s
  double window = 0.0;      // tau [s]
  double kappa_meas = 0.0;  // rad/s
  double eta = 1.0;
  double theta = 0.0;       // rad
  VacuumTerm vacuum = VacuumTerm::kIntegrated;

  void validate() const;
};

struct OutputCovariance2 {
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  std::optional<Eigen::Matrix2d> dsigma;
  double abs_error = 0.0;  // quadrature estimate for the numeric route
};

// Unnormalised sinc, sin(x)/x.
double sinc(double x);

// Closed form. The cavity term is kappa_meas tau sinc^2(x/2) G(tau/2)
// sigma_opt G(tau/2)^T with x = omega_k tau, which expands to the three
// published entry formulas.
OutputCovariance2 output_covariance(const Eigen::Matrix2d& sigma_opt, const MeasurementSpec& spec);
OutputCovariance2 output_covariance(const CovarianceMatrix4& sigma, const MeasurementSpec& spec);

// Linear part only (no vacuum term); used to push sigma' through the filter.
Eigen::Matrix2d output_filter_linear(const Eigen::Matrix2d& sigma_opt, const MeasurementSpec& spec);

// 2D window integral (kappa/tau) int int G(t) s G(s)^T + (1/tau) int G G^T,
// G(t) the rotation by omega_k t.
OutputCovariance2 output_covariance_numeric(const Eigen::Matrix2d& sigma_opt,
                                            const MeasurementSpec& spec, double rel_tol = 1e-12);
OutputCovariance2 output_covariance_numeric(const CovarianceMatrix4& sigma,
                                            const MeasurementSpec& spec, double rel_tol = 1e-12);

// Homodyne variance (1 - eta + 2 eta R^T s R) / (4 eta), R = (cos th, sin th).
double homodyne_variance(const Eigen::Matrix2d& sigma_out, double theta, double eta);

// Normalised outcome density for the quadrature at spec.theta.
double homodyne_pdf(const Eigen::Matrix2d& sigma_out, const MeasurementSpec& spec, double k);

}  // namespace omfisher
