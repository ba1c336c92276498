#include "omfisher/fisher.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"

namespace omfisher {

using constants::kPi;

namespace {

Eigen::Vector2d direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

void require_positive_definite(const Eigen::Matrix2d& s, const char* who) {
  if (!s.allFinite() || !(s(0, 0) > 0.0) || !(s.determinant() > 0.0))
    throw DomainError(std::string(who) + ": sigma must be positive definite");
}

double wrap_pi(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

}  // namespace

SldCoefficients sld_coefficients(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma) {
  require_positive_definite(sigma, "sld_coefficients");
  const Eigen::Matrix2d inv = sigma.inverse();
  SldCoefficients c;
  c.phi = 0.5 * inv * dsigma * inv;
  c.phi = 0.5 * (c.phi + c.phi.transpose()).eval();
  c.nu = (c.phi * sigma).trace();
  return c;
}

QfiBreakdown qfi_gaussian_breakdown(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma) {
  QfiBreakdown b;
  b.sld = sld_coefficients(sigma, dsigma);
  const Eigen::Matrix2d dinv = -2.0 * b.sld.phi;
  const Eigen::Matrix2d m = dinv * sigma;
  b.value = 0.5 * (m * m).trace() - dinv.determinant() / 8.0;
  const Eigen::Matrix2d ps = b.sld.phi * sigma;
  const double det_phi = b.sld.phi.determinant();
  b.long_form = 3.0 * (ps * ps).trace() - 2.0 * b.sld.nu * ps.trace() +
                2.0 * sigma.determinant() * det_phi - 0.5 * det_phi + b.sld.nu * b.sld.nu;
  return b;
}

double qfi_gaussian(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma) {
  return qfi_gaussian_breakdown(sigma, dsigma).value;
}

double qfi_gaussian_exact(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma) {
  require_positive_definite(sigma, "qfi_gaussian_exact");
  const double det = sigma.determinant();
  const Eigen::Matrix2d m = sigma.inverse() * dsigma;
  const double mu = 1.0 / (2.0 * std::sqrt(det));
  // d det / dg = det * Tr[s^-1 s'].
  const double dmu = -0.5 * mu * m.trace();
  const double mu2 = mu * mu;
  double h = 0.5 * (m * m).trace() / (1.0 + mu2);
  const double gap = 1.0 - mu2 * mu2;
  if (gap > 1e-14) h += 2.0 * dmu * dmu / gap;
  return h;
}

double cfi_bhd(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double theta, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("cfi_bhd: eta must lie in (0, 1]");
  const Eigen::Vector2d r = direction(theta);
  const double den = 1.0 - eta + 2.0 * eta * r.dot(sigma * r);
  if (!(den > 0.0)) throw DomainError("cfi_bhd: non-positive homodyne variance");
  const double q = eta * r.dot(dsigma * r) / den;
  return 2.0 * q * q;
}

double cfi_ideal(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double theta) {
  require_positive_definite(sigma, "cfi_ideal");
  const Eigen::Vector2d r = direction(theta);
  const double q = r.dot(dsigma * r) / r.dot(sigma * r);
  return q * q;
}

ThetaMax theta_max(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("theta_max: eta must lie in (0, 1]");
  require_positive_definite(sigma, "theta_max");
  if (eta < 1.0) return theta_max_search(sigma, dsigma, eta);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sigma);
  const Eigen::Matrix2d inv_sqrt = es.operatorInverseSqrt();
  const Eigen::Matrix2d m = inv_sqrt * dsigma * inv_sqrt;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> em(0.5 * (m + m.transpose()));
  const auto& ev = em.eigenvalues();
  const int k = std::abs(ev(1)) >= std::abs(ev(0)) ? 1 : 0;
  const Eigen::Vector2d r = inv_sqrt * em.eigenvectors().col(k);

  ThetaMax out;
  out.theta = wrap_pi(std::atan2(r(1), r(0)));
  out.lambda = ev(k);
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(1)));
  out.degenerate = scale == 0.0 || std::abs(std::abs(ev(0)) - std::abs(ev(1))) <= 1e-12 * scale;
  out.cfi = cfi_bhd(sigma, dsigma, out.theta, 1.0);
  return out;
}

ThetaMax theta_max_search(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double eta) {
  constexpr int kGrid = 360;
  auto f = [&](double t) { return cfi_bhd(sigma, dsigma, t, eta); };
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double v = f(kPi * i / kGrid);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = kPi / kGrid;
  double a = kPi * best / kGrid - step;
  double b = a + 2.0 * step;
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  ThetaMax out;
  out.theta = wrap_pi(0.5 * (a + b));
  out.cfi = f(out.theta);
  if (out.cfi < best_val) {
    out.theta = kPi * best / kGrid;
    out.cfi = best_val;
  }
  const Eigen::Vector2d r = direction(out.theta);
  const double s_eta = (1.0 - eta) / (2.0 * eta) + r.dot(sigma * r);
  out.lambda = r.dot(dsigma * r) / s_eta;
  return out;
}

Eigen::Matrix2d dsigma_dg(const std::function<Eigen::Matrix2d(double)>& pipeline, double g,
                          const FiniteDifferenceOptions& opt) {
  const double h = std::max(opt.h_rel * std::abs(g), opt.h_floor);
  if (!(h > 0.0)) throw DomainError("dsigma_dg: step must be > 0");
  if (g - 2.0 * h >= 0.0) {
    const Eigen::Matrix2d p1 = pipeline(g + h), m1 = pipeline(g - h);
    const Eigen::Matrix2d p2 = pipeline(g + 2.0 * h), m2 = pipeline(g - 2.0 * h);
    const Eigen::Matrix2d d1 = (p1 - m1) / (2.0 * h);
    const Eigen::Matrix2d d2 = (p2 - m2) / (4.0 * h);
    return (4.0 * d1 - d2) / 3.0;
  }
  const Eigen::Matrix2d f0 = pipeline(g);
  const Eigen::Matrix2d f1 = pipeline(g + h), f2 = pipeline(g + 2.0 * h);
  const Eigen::Matrix2d f4 = pipeline(g + 4.0 * h);
  const Eigen::Matrix2d d1 = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
  const Eigen::Matrix2d d2 = (-3.0 * f0 + 4.0 * f2 - f4) / (4.0 * h);
  return (4.0 * d1 - d2) / 3.0;
}

std::string to_string(DerivativeMethod m) {
  return m == DerivativeMethod::kFiniteDifference ? "finite_difference" : "derivative_lyapunov";
}

std::string to_string(CfiConvention c) {
  return c == CfiConvention::kBhdLimit ? "bhd_limit" : "printed_ideal";
}

FisherReport fisher_report(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma,
                           std::optional<double> theta, double eta, CfiConvention convention,
                           DerivativeMethod method) {
  FisherReport r;
  r.eta = eta;
  r.derivative_method = method;
  r.convention = convention;
  const QfiBreakdown q = qfi_gaussian_breakdown(sigma, dsigma);
  r.qfi = q.value;
  r.qfi_long_form = q.long_form;
  r.qfi_exact = qfi_gaussian_exact(sigma, dsigma);

  const ThetaMax tm = theta_max(sigma, dsigma, eta);
  r.theta_max = tm.theta;
  r.lambda_max = tm.lambda;
  r.degenerate = tm.degenerate;
  const double factor = convention == CfiConvention::kBhdLimit ? 1.0 : 2.0;
  r.cfi_max = factor * tm.cfi;
  r.theta = theta ? *theta : tm.theta;
  r.cfi = factor * cfi_bhd(sigma, dsigma, r.theta, eta);
  r.cfi_ideal = cfi_ideal(sigma, dsigma, r.theta);
  r.cfi_bhd_eta1 = cfi_bhd(sigma, dsigma, r.theta, 1.0);
  r.saturation_ratio = r.qfi != 0.0 ? r.cfi_max / r.qfi : 0.0;
  r.saturation_ratio_exact = r.qfi_exact != 0.0 ? r.cfi_max / r.qfi_exact : 0.0;
  return r;
}

}  // namespace omfisher
