#include "omfisher/output_field.hpp"

#include <cmath>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/quadrature.hpp"

namespace omfisher {

namespace {

// Window kernel G(t): rows (cos wt, sin wt), (-sin wt, cos wt).
Eigen::Matrix2d window_kernel(double phase) {
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  Eigen::Matrix2d g;
  g << c, s, -s, c;
  return g;
}

Eigen::Matrix2d vacuum_term(const MeasurementSpec& spec) {
  if (spec.vacuum == VacuumTerm::kPrinted)
    return sinc(2.0 * spec.omega_k * spec.window) * Eigen::Matrix2d::Identity();
  return Eigen::Matrix2d::Identity();
}

}  // namespace

void MeasurementSpec::validate() const {
  if (!(window > 0.0) || !std::isfinite(window)) throw DomainError("MeasurementSpec: window must be > 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("MeasurementSpec: eta must lie in (0, 1]");
  if (!(kappa_meas > 0.0) || !std::isfinite(kappa_meas))
    throw DomainError("MeasurementSpec: kappa_meas must be > 0");
  if (!std::isfinite(omega_k) || !std::isfinite(theta))
    throw DomainError("MeasurementSpec: omega_k and theta must be finite");
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

Eigen::Matrix2d output_filter_linear(const Eigen::Matrix2d& sigma_opt, const MeasurementSpec& spec) {
  spec.validate();
  const double x = spec.omega_k * spec.window;
  const double sc = sinc(0.5 * x);
  const Eigen::Matrix2d g = window_kernel(0.5 * x);
  Eigen::Matrix2d out = spec.kappa_meas * spec.window * sc * sc * (g * sigma_opt * g.transpose());
  return 0.5 * (out + out.transpose());
}

OutputCovariance2 output_covariance(const Eigen::Matrix2d& sigma_opt, const MeasurementSpec& spec) {
  OutputCovariance2 out;
  out.sigma = output_filter_linear(sigma_opt, spec) + vacuum_term(spec);
  return out;
}

OutputCovariance2 output_covariance(const CovarianceMatrix4& sigma, const MeasurementSpec& spec) {
  return output_covariance(sigma.optical(), spec);
}

OutputCovariance2 output_covariance_numeric(const Eigen::Matrix2d& sigma_opt,
                                            const MeasurementSpec& spec, double rel_tol) {
  spec.validate();
  const double tau = spec.window;
  const double w = spec.omega_k;
  // Absolute floors keep exactly-zero entries from stalling the relative test.
  const double scale = std::max(sigma_opt.cwiseAbs().maxCoeff(), 1.0);
  quad::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-16 * scale * tau;

  double inner_err = 0.0;
  auto outer = [&](double t) -> Eigen::Matrix2d {
    const Eigen::Matrix2d gt = window_kernel(w * t);
    auto inner = [&](double s) -> Eigen::Matrix2d {
      return gt * sigma_opt * window_kernel(w * s).transpose();
    };
    const auto r = quad::integrate_or_throw(inner, {0.0, tau}, opt, "output_covariance_numeric");
    inner_err = std::max(inner_err, r.abs_error);
    return r.value;
  };
  quad::Options outer_opt = opt;
  outer_opt.abs_tol = 1e-16 * scale * tau * tau;
  const auto cav =
      quad::integrate_or_throw(outer, {0.0, tau}, outer_opt, "output_covariance_numeric");

  Eigen::Matrix2d vac;
  double vac_err = 0.0;
  if (spec.vacuum == VacuumTerm::kPrinted) {
    vac = vacuum_term(spec);
  } else {
    auto f = [&](double t) -> Eigen::Matrix2d {
      const Eigen::Matrix2d g = window_kernel(w * t);
      return g * g.transpose();
    };
    const auto r = quad::integrate_or_throw(f, {0.0, tau}, opt, "output_covariance_numeric");
    vac = r.value / tau;
    vac_err = r.abs_error / tau;
  }

  OutputCovariance2 out;
  const double k = spec.kappa_meas / tau;
  out.sigma = k * cav.value + vac;
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.abs_error = k * (cav.abs_error + tau * inner_err) + vac_err;
  return out;
}

OutputCovariance2 output_covariance_numeric(const CovarianceMatrix4& sigma,
                                            const MeasurementSpec& spec, double rel_tol) {
  return output_covariance_numeric(sigma.optical(), spec, rel_tol);
}

double homodyne_variance(const Eigen::Matrix2d& sigma_out, double theta, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("homodyne_variance: eta must lie in (0, 1]");
  const Eigen::Vector2d r(std::cos(theta), std::sin(theta));
  const double v = (1.0 - eta + 2.0 * eta * r.dot(sigma_out * r)) / (4.0 * eta);
  if (!(v > 0.0)) throw DomainError("homodyne_variance: non-positive variance");
  return v;
}

double homodyne_pdf(const Eigen::Matrix2d& sigma_out, const MeasurementSpec& spec, double k) {
  const double v = homodyne_variance(sigma_out, spec.theta, spec.eta);
  return std::exp(-0.5 * k * k / v) / std::sqrt(2.0 * constants::kPi * v);
}

}  // namespace omfisher
