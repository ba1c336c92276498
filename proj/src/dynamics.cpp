#include "omfisher/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/noise_kernels.hpp"
#include "omfisher/quadrature.hpp"

namespace omfisher {

using constants::kHbar;

namespace {

Eigen::Matrix4d to_si_similar(const Eigen::Matrix4d& scaled, double xz, double pz) {
  const Eigen::Vector4d s(xz, pz, 1.0, 1.0);
  return s.asDiagonal() * scaled * s.cwiseInverse().asDiagonal();
}

Eigen::Matrix4d to_si_congruent(const Eigen::Matrix4d& scaled, double xz, double pz) {
  const Eigen::Vector4d s(xz, pz, 1.0, 1.0);
  return s.asDiagonal() * scaled * s.asDiagonal();
}

// Frequencies where the resolvent of A varies fastest.
std::vector<double> resonance_points(const Eigen::Matrix4d& a, double upper) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("diffusion_matrix: eigenvalue solve failed");
  std::vector<double> pts{0.0, upper};
  for (int i = 0; i < 4; ++i) {
    const double c = std::abs(es.eigenvalues()(i).imag());
    const double w = std::abs(es.eigenvalues()(i).real());
    for (double k : {-30.0, -3.0, 0.0, 3.0, 30.0}) {
      const double x = c + k * w;
      if (x > 0.0 && x < upper) pts.push_back(x);
    }
  }
  return pts;
}

double brownian_coefficient(const SystemParams& p) { return 2.0 / (p.mass * p.omega_m); }

Eigen::Matrix4d optical_part(const SystemParams& p) {
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  d(2, 2) = d(3, 3) = 0.5 * p.kappa();
  return d;
}

Eigen::Matrix4d symmetric_outer_p(const Eigen::Vector4d& w) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.row(1) += w.transpose();
  m.col(1) += w;
  return m;
}

}  // namespace

DriftMatrix DriftMatrix::from_scaled(const Eigen::Matrix4d& a) {
  DriftMatrix d;
  d.scaled = a;
  d.si = a;
  return d;
}

DiffusionMatrix DiffusionMatrix::from_scaled(const Eigen::Matrix4d& d, const DriftMatrix& a) {
  DiffusionMatrix out;
  out.scaled = d;
  out.si = to_si_congruent(d, a.x_zpf, a.p_zpf);
  return out;
}

DriftMatrix drift_matrix(const SystemParams& p, const SteadyState& ss) {
  return drift_matrix(p, ss.alpha, ss.delta_eff);
}

DriftMatrix drift_matrix(const SystemParams& p, double alpha, double delta_eff) {
  DriftMatrix d;
  d.x_zpf = std::sqrt(kHbar / (2.0 * p.mass * p.omega_m));
  d.p_zpf = std::sqrt(kHbar * p.mass * p.omega_m / 2.0);
  const double ga = p.g_freq * alpha;
  Eigen::Matrix4d& a = d.scaled;
  a.setZero();
  a(0, 1) = p.omega_m;
  a(1, 0) = -p.omega_m;
  a(1, 1) = -p.gamma;
  a(1, 2) = 2.0 * std::sqrt(2.0) * ga;
  a(2, 2) = -0.5 * p.kappa();
  a(3, 3) = -0.5 * p.kappa();
  a(2, 3) = delta_eff;
  a(3, 2) = -delta_eff;
  a(3, 0) = std::sqrt(2.0) * ga;
  d.si = to_si_similar(a, d.x_zpf, d.p_zpf);
  return d;
}

Eigen::Matrix4d drift_derivative(const SystemParams& p, const SteadyState& ss) {
  const SteadyStateDerivative sd = steady_state_derivative(p, ss);
  const double dga = ss.alpha + p.g_freq * sd.dalpha;
  Eigen::Matrix4d da = Eigen::Matrix4d::Zero();
  da(1, 2) = 2.0 * std::sqrt(2.0) * dga;
  da(3, 0) = std::sqrt(2.0) * dga;
  da(2, 3) = sd.ddelta_eff;
  da(3, 2) = -sd.ddelta_eff;
  return da;
}

bool is_stable(const DriftMatrix& a) { return is_stable(a.scaled); }

Eigen::Matrix4d matrix_exponential(const Eigen::Matrix4d& m) {
  if (!m.allFinite()) throw NumericalError("matrix_exponential: non-finite input");
  Eigen::Matrix4d e = m.exp();
  if (!e.allFinite()) throw NumericalError("matrix_exponential: overflow");
  return e;
}

DiffusionMatrix diffusion_matrix(const SystemParams& p, const DriftMatrix& a,
                                 const DiffusionOptions& opt) {
  if (!is_stable(a)) throw PreconditionError("diffusion_matrix: drift matrix is not Hurwitz");
  DiffusionMatrix out;
  Eigen::Matrix4d d = optical_part(p);
  if (opt.kernel_scale != 0.0) {
    const BathSpec bath = BathSpec::from(p);
    const Eigen::Matrix4d& as = a.scaled;
    const Eigen::Matrix4d a2 = as * as;
    const Eigen::Vector4d ep = Eigen::Vector4d::UnitY();
    auto integrand = [&](double w) -> Eigen::Vector4d {
      Eigen::Matrix4d m = a2;
      m.diagonal().array() += w * w;
      const Eigen::Vector4d y = m.partialPivLu().solve(ep);
      return (-noise_weight(bath, w)) * (as * y);
    };
    quad::Options qo;
    qo.rel_tol = opt.rel_tol;
    qo.max_panels = opt.max_panels;
    const auto r = quad::integrate_or_throw(integrand, resonance_points(as, 60.0 * p.cutoff), qo,
                                            "diffusion_matrix");
    const double coef = brownian_coefficient(p) * opt.kernel_scale;
    d += coef * symmetric_outer_p(r.value);
    out.abs_error = 2.0 * std::abs(coef) * r.abs_error;
    out.evaluations = r.evaluations;
  }
  out.scaled = 0.5 * (d + d.transpose());
  out.si = to_si_congruent(out.scaled, a.x_zpf, a.p_zpf);
  return out;
}

DiffusionMatrix diffusion_derivative(const SystemParams& p, const DriftMatrix& a,
                                     const Eigen::Matrix4d& da, const DiffusionOptions& opt) {
  if (!is_stable(a)) throw PreconditionError("diffusion_derivative: drift matrix is not Hurwitz");
  DiffusionMatrix out;
  const BathSpec bath = BathSpec::from(p);
  const Eigen::Matrix4d& as = a.scaled;
  const Eigen::Matrix4d a2 = as * as;
  const Eigen::Matrix4d da2 = da * as + as * da;
  const Eigen::Vector4d ep = Eigen::Vector4d::UnitY();
  // d[-A M^-1] = -A' M^-1 + A M^-1 (A'A + A A') M^-1,  M = A^2 + w^2.
  auto integrand = [&](double w) -> Eigen::Vector4d {
    Eigen::Matrix4d m = a2;
    m.diagonal().array() += w * w;
    const auto lu = m.partialPivLu();
    const Eigen::Vector4d y = lu.solve(ep);
    const Eigen::Vector4d z = lu.solve(da2 * y);
    return noise_weight(bath, w) * (-(da * y) + as * z);
  };
  quad::Options qo;
  qo.rel_tol = opt.rel_tol;
  qo.max_panels = opt.max_panels;
  const auto r = quad::integrate_or_throw(integrand, resonance_points(as, 60.0 * p.cutoff), qo,
                                          "diffusion_derivative");
  const double coef = brownian_coefficient(p) * opt.kernel_scale;
  out.scaled = coef * symmetric_outer_p(r.value);
  out.scaled = 0.5 * (out.scaled + out.scaled.transpose()).eval();
  out.abs_error = 2.0 * std::abs(coef) * r.abs_error;
  out.evaluations = r.evaluations;
  out.si = to_si_congruent(out.scaled, a.x_zpf, a.p_zpf);
  return out;
}

Eigen::Matrix4d solve_lyapunov(const Eigen::Matrix4d& a, const Eigen::Matrix4d& q,
                               double* residual) {
  if (!a.allFinite() || !q.allFinite()) throw NumericalError("solve_lyapunov: non-finite input");
  Eigen::EigenSolver<Eigen::Matrix4d> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("solve_lyapunov: eigenvalue solve failed");
  const auto& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      if (std::abs(ev(i) + ev(j)) <= 1e-13 * scale)
        throw DegeneracyError("solve_lyapunov: eigenvalue pair of A sums to zero");

  using Mat16 = Eigen::Matrix<double, 16, 16>;
  using Vec16 = Eigen::Matrix<double, 16, 1>;
  Mat16 k = Mat16::Zero();
  const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
  // Column-major vec: vec(A X) = (I (x) A) vec X, vec(X A^T) = (A (x) I) vec X.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      k.block<4, 4>(4 * i, 4 * j) += id(i, j) * a;
      k.block<4, 4>(4 * i, 4 * j) += a(i, j) * id;
    }
  const Eigen::FullPivLU<Mat16> lu(k);
  if (!lu.isInvertible()) throw DegeneracyError("solve_lyapunov: singular Kronecker system");
  const Vec16 rhs = -Eigen::Map<const Vec16>(q.data());
  Vec16 x = lu.solve(rhs);
  for (int it = 0; it < 2; ++it) x += lu.solve((rhs - k * x).eval());

  Eigen::Matrix4d s = Eigen::Map<const Eigen::Matrix4d>(x.data());
  s = 0.5 * (s + s.transpose()).eval();
  if (residual) {
    const double qn = q.norm();
    const double rn = (a * s + s * a.transpose() + q).norm();
    *residual = qn > 0.0 ? rn / qn : rn;
  }
  return s;
}

CovarianceMatrix4 stationary_covariance(const DriftMatrix& a, const DiffusionMatrix& d) {
  if (!is_stable(a)) throw PreconditionError("stationary_covariance: drift matrix is not Hurwitz");
  CovarianceMatrix4 c;
  c.scaled = solve_lyapunov(a.scaled, d.scaled, &c.residual);
  c.si = to_si_congruent(c.scaled, a.x_zpf, a.p_zpf);
  return c;
}

}  // namespace omfisher
