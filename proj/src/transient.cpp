#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/noise_kernels.hpp"
#include "omfisher/oracle.hpp"

namespace omfisher::oracle {

namespace {

using State = Eigen::Matrix<double, 24, 1>;

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kE[7] = {35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695,
                          125.0 / 192 - 393.0 / 640, -2187.0 / 6784 + 92097.0 / 339200,
                          11.0 / 84 - 187.0 / 2100, -1.0 / 40};

struct System {
  Eigen::Matrix4d a;
  Eigen::Matrix4d d_opt;
  double coef;
  BathSpec bath;

  Eigen::Matrix4d diffusion(const Eigen::Vector4d& w) const {
    Eigen::Matrix4d d = d_opt;
    d.row(1) += coef * w.transpose();
    d.col(1) += coef * w;
    return d;
  }

  State rhs(double t, const State& y) const {
    const Eigen::Vector4d v = y.segment<4>(0);
    const Eigen::Vector4d w = y.segment<4>(4);
    const Eigen::Map<const Eigen::Matrix4d> s(y.data() + 8);
    State dy;
    dy.segment<4>(0) = a * v;
    dy.segment<4>(4) = kernel_dr(bath, t).d_r * v;
    Eigen::Map<Eigen::Matrix4d>(dy.data() + 8) = a * s + s * a.transpose() + diffusion(w);
    return dy;
  }
};

// int_0^inf exp(A t) D exp(A^T t) dt + lim exp(A t) s0 exp(A^T t), by Van Loan
// blocks and repeated doubling of the interval.
Eigen::Matrix4d propagate_to_infinity(const Eigen::Matrix4d& a, const Eigen::Matrix4d& d,
                                      const Eigen::Matrix4d& s0) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(a, false);
  const double rate = es.eigenvalues().cwiseAbs().maxCoeff();
  const double h = 0.5 / rate;
  Eigen::Matrix<double, 8, 8> c = Eigen::Matrix<double, 8, 8>::Zero();
  c.block<4, 4>(0, 0) = -a * h;
  c.block<4, 4>(0, 4) = d * h;
  c.block<4, 4>(4, 4) = a.transpose() * h;
  const Eigen::Matrix<double, 8, 8> e = c.exp();
  Eigen::Matrix4d phi = e.block<4, 4>(4, 4).transpose();
  Eigen::Matrix4d q = phi * e.block<4, 4>(0, 4);
  q = 0.5 * (q + q.transpose()).eval();
  Eigen::Matrix4d s = s0;
  for (int k = 0; k < 200 && phi.cwiseAbs().maxCoeff() > 1e-20; ++k) {
    q += phi * q * phi.transpose();
    q = 0.5 * (q + q.transpose()).eval();
    phi = (phi * phi).eval();
  }
  if (phi.cwiseAbs().maxCoeff() > 1e-20)
    throw ConvergenceError("transient_covariance: propagator did not decay");
  return q + phi * s * phi.transpose();
}

}  // namespace

TransientResult transient_covariance(const SystemParams& p, const DriftMatrix& a,
                                     const TransientOptions& opt) {
  if (!is_stable(a)) throw PreconditionError("transient_covariance: drift matrix is not Hurwitz");
  System sys;
  sys.a = a.scaled;
  sys.d_opt = Eigen::Matrix4d::Zero();
  sys.d_opt(2, 2) = sys.d_opt(3, 3) = 0.5 * p.kappa();
  sys.coef = 2.0 / (p.mass * p.omega_m);
  sys.bath = BathSpec::from(p);

  // Kernel tail ~ 1/(cutoff t)^2 against a response oscillating at omega_m.
  const double period = constants::kTwoPi / p.omega_m;
  const double t1 = std::max(200.0 * period, 1.0 / std::sqrt(opt.tail_target * p.cutoff * p.omega_m));

  State y = State::Zero();
  y(1) = 1.0;  // v(0) = e_p
  Eigen::Map<Eigen::Matrix4d> s0(y.data() + 8);
  s0.diagonal() << 0.5, 0.5, 0.5, 0.5;

  Eigen::EigenSolver<Eigen::Matrix4d> es(sys.a, false);
  double h = 1e-3 / es.eigenvalues().cwiseAbs().maxCoeff();
  double t = 0.0;
  long steps = 0;
  State k[7];
  k[0] = sys.rhs(t, y);
  Eigen::Array<double, 24, 1> scale = y.cwiseAbs().array();
  while (t < t1) {
    if (steps > 50'000'000) throw ConvergenceError("transient_covariance: step budget exhausted");
    h = std::min(h, t1 - t);
    for (int i = 1; i < 7; ++i) {
      State yi = y;
      for (int j = 0; j < i; ++j) yi += h * kA[i][j] * k[j];
      k[i] = sys.rhs(t + kC[i] * h, yi);
    }
    State ynew = y;
    for (int j = 0; j < 6; ++j) ynew += h * kA[6][j] * k[j];
    State err = State::Zero();
    for (int j = 0; j < 7; ++j) err += h * kE[j] * k[j];

    // Per-block absolute floors: rel_tol times the block's running magnitude.
    scale = scale.max(ynew.cwiseAbs().array());
    Eigen::Array<double, 24, 1> atol;
    atol.segment<4>(0).setConstant(scale.segment<4>(0).maxCoeff());
    atol.segment<4>(4).setConstant(scale.segment<4>(4).maxCoeff());
    atol.segment<16>(8).setConstant(scale.segment<16>(8).maxCoeff());
    atol = opt.rel_tol * atol.max(1e-300);
    const Eigen::Array<double, 24, 1> tol =
        atol + opt.rel_tol * y.cwiseAbs().array().max(ynew.cwiseAbs().array());
    const double en = std::sqrt((err.array() / tol).square().mean());
    if (en <= 1.0) {
      t += h;
      y = ynew;
      k[0] = k[6];
      ++steps;
    }
    const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= fac;
  }

  TransientResult out;
  out.t1 = t1;
  out.steps = steps;
  const Eigen::Vector4d w = y.segment<4>(4);
  out.diffusion = sys.diffusion(w);
  out.diffusion = 0.5 * (out.diffusion + out.diffusion.transpose()).eval();
  const Eigen::Matrix4d s1 = Eigen::Map<const Eigen::Matrix4d>(y.data() + 8);
  out.sigma = propagate_to_infinity(sys.a, out.diffusion, 0.5 * (s1 + s1.transpose()));
  return out;
}

}  // namespace omfisher::oracle
