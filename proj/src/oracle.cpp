#include "omfisher/oracle.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "omfisher/errors.hpp"
#include "omfisher/output_field.hpp"
#include "omfisher/quadrature.hpp"

namespace omfisher::oracle {

namespace {

using cplx = std::complex<double>;

Eigen::MatrixXd annihilation(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd rotate(const Eigen::MatrixXd& rho, double psi, int keep) {
  Eigen::MatrixXcd out(keep, keep);
  for (int m = 0; m < keep; ++m)
    for (int n = 0; n < keep; ++n) out(m, n) = rho(m, n) * std::polar(1.0, -psi * (m - n));
  return out;
}

}  // namespace

int default_n_max(const Eigen::Matrix2d& sigma) {
  const double nu = std::sqrt(std::max(sigma.determinant(), 0.0));
  return nu <= 3.0 ? 80 : static_cast<int>(std::ceil(40.0 * nu));
}

Eigen::Matrix2d fock_covariance(const FockState& s) {
  const int dim = s.n_max + 1;
  const Eigen::MatrixXcd a = annihilation(dim).cast<cplx>();
  const Eigen::MatrixXcd ad = a.adjoint();
  const double r2 = std::sqrt(2.0);
  const Eigen::MatrixXcd x = (a + ad) / r2;
  const Eigen::MatrixXcd y = cplx(0.0, 1.0) * (ad - a) / r2;
  Eigen::Matrix2d c;
  c(0, 0) = (s.rho * x * x).trace().real();
  c(1, 1) = (s.rho * y * y).trace().real();
  c(0, 1) = c(1, 0) = 0.5 * (s.rho * (x * y + y * x)).trace().real();
  return c;
}

FockState gaussian_to_fock(const Eigen::Matrix2d& sigma, int n_max) {
  if (!sigma.allFinite()) throw DomainError("gaussian_to_fock: non-finite sigma");
  const double det = sigma.determinant();
  if (!(sigma(0, 0) > 0.0) || det < 0.25 * (1.0 - 1e-12))
    throw UnphysicalStateError("gaussian_to_fock: det sigma < 1/4");
  if (n_max <= 0) n_max = default_n_max(sigma);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (sigma + sigma.transpose()));
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(1);
  const Eigen::Vector2d major = es.eigenvectors().col(1);
  const double nu = std::sqrt(std::max(det, 0.25));
  const double r = 0.25 * std::log(hi / lo);
  const double phi = std::atan2(major(1), major(0));
  const double nbar = std::max(nu - 0.5, 0.0);

  const int keep = n_max + 1;
  const int dim = keep + std::max(40, keep / 2);
  Eigen::VectorXd p(dim);
  const double q = nbar / (nbar + 1.0);
  for (int n = 0; n < dim; ++n) p(n) = (n == 0 ? 1.0 : p(n - 1) * q);
  p /= (nbar + 1.0);

  const Eigen::MatrixXd a = annihilation(dim);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd k = (0.5 * r) * (a2 - a2.transpose());
  const Eigen::MatrixXd u = k.exp();  // exp(-k) = u^T

  FockState best;
  double best_err = INFINITY;
  const double scale = sigma.cwiseAbs().maxCoeff();
  for (int sign_r : {-1, 1}) {
    const Eigen::MatrixXd us = sign_r > 0 ? u : Eigen::MatrixXd(u.transpose());
    const Eigen::MatrixXd sq = us * p.asDiagonal() * us.transpose();
    for (int sign_phi : {1, -1}) {
      FockState s;
      s.n_max = n_max;
      s.rho = rotate(sq, sign_phi * phi, keep);
      s.rho = 0.5 * (s.rho + s.rho.adjoint()).eval();
      s.trace_deficit = 1.0 - s.rho.trace().real();
      const double err = (fock_covariance(s) - sigma).cwiseAbs().maxCoeff() / scale;
      if (err < best_err) {
        best_err = err;
        best = std::move(s);
      }
      if (r == 0.0) break;
    }
    if (r == 0.0) break;
  }
  if (best_err > 1e-6)
    throw NumericalError("gaussian_to_fock: truncated state does not reproduce sigma");
  return best;
}

double qfi_fock(const FockState& rho_minus, const FockState& rho_plus, double h) {
  if (rho_minus.n_max != rho_plus.n_max) throw DomainError("qfi_fock: truncations differ");
  if (!(h > 0.0)) throw DomainError("qfi_fock: h must be > 0");
  const Eigen::MatrixXcd drho = (rho_plus.rho - rho_minus.rho) / (2.0 * h);
  const Eigen::MatrixXcd mid = 0.5 * (rho_plus.rho + rho_minus.rho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (mid + mid.adjoint()));
  const Eigen::VectorXd& pr = es.eigenvalues();
  const Eigen::MatrixXcd d = es.eigenvectors().adjoint() * drho * es.eigenvectors();
  double h_sum = 0.0;
  const int dim = static_cast<int>(pr.size());
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double s = pr(i) + pr(j);
      if (s > 1e-12) h_sum += 2.0 * std::norm(d(i, j)) / s;
    }
  return h_sum;
}

FockQfi qfi_fock_family(const std::function<Eigen::Matrix2d(double)>& sigma_of_g, double g, double h,
                        int n_max, double tol) {
  const Eigen::Matrix2d sm = sigma_of_g(g - h);
  const Eigen::Matrix2d sp = sigma_of_g(g + h);
  FockQfi out;
  out.n_max = n_max > 0 ? n_max : std::max(default_n_max(sm), default_n_max(sp));
  out.value = qfi_fock(gaussian_to_fock(sm, out.n_max), gaussian_to_fock(sp, out.n_max), h);
  out.value_extended =
      qfi_fock(gaussian_to_fock(sm, out.n_max + 20), gaussian_to_fock(sp, out.n_max + 20), h);
  const double ref = std::max(std::abs(out.value_extended), 1e-300);
  out.relative_change = std::abs(out.value - out.value_extended) / ref;
  if (out.relative_change > tol)
    throw ConvergenceError("qfi_fock_family: truncation not converged at n_max = " +
                           std::to_string(out.n_max));
  return out;
}

double cfi_numeric(const PdfAt& pdf_at, double g, double h, double center, double sd) {
  if (!(h > 0.0) || !(sd > 0.0)) throw DomainError("cfi_numeric: h and sd must be > 0");
  std::array<std::function<double(double)>, 5> pdf;
  for (int i = 0; i < 5; ++i) pdf[i] = pdf_at(g + (i - 2) * h);

  std::vector<double> pts;
  for (double s : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) pts.push_back(center + s * sd);
  quad::Options opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-300;
  for (int i = 0; i < 5; ++i) {
    const auto norm = quad::integrate(pdf[i], pts, opt);
    if (std::abs(norm.value - 1.0) > 1e-8)
      throw NumericalError("cfi_numeric: pdf normalisation drift beyond 1e-8");
  }
  auto integrand = [&](double k) {
    const double p0 = pdf[2](k);
    if (p0 <= 0.0) return 0.0;
    const double dl = (-std::log(pdf[4](k)) + 8.0 * std::log(pdf[3](k)) - 8.0 * std::log(pdf[1](k)) +
                       std::log(pdf[0](k))) /
                      (12.0 * h);
    return dl * dl * p0;
  };
  // The log-stencil carries ~1e-10 relative roundoff; asking for more stalls.
  // The absolute floor is that roundoff squared (|ln P| <= ~40 on the range).
  opt.rel_tol = 1e-9;
  opt.abs_tol = std::pow(64.0 * std::numeric_limits<double>::epsilon() / h, 2);
  const auto r = quad::integrate(integrand, pts, opt);
  if (!r.converged) throw QuadratureError("cfi_numeric: quadrature did not converge", r.value, r.abs_error);
  return r.value;
}

double cfi_numeric_homodyne(const std::function<Eigen::Matrix2d(double)>& sigma_of_g, double g,
                            double theta, double eta, double h) {
  MeasurementSpec spec;
  spec.theta = theta;
  spec.eta = eta;
  auto pdf_at = [&](double gg) -> std::function<double(double)> {
    const Eigen::Matrix2d s = sigma_of_g(gg);
    return [s, spec](double k) { return homodyne_pdf(s, spec, k); };
  };
  const double sd = std::sqrt(homodyne_variance(sigma_of_g(g), theta, eta));
  return cfi_numeric(pdf_at, g, h, 0.0, sd);
}

double covariance_distance(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::sqrt(b(i, i) * b(j, j)));
  return worst;
}

}  // namespace omfisher::oracle
