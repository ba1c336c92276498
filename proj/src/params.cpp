#include "omfisher/params.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "omfisher/constants.hpp"
#include "omfisher/dynamics.hpp"
#include "omfisher/errors.hpp"

namespace omfisher {

using constants::kHbar;
using constants::kTwoPi;

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("SystemParams: ") + what);
}

// Radiation-pressure shift coefficient: Delta = delta0 - c*|alpha|^2.
double shift_coefficient(const SystemParams& p) {
  return 2.0 * p.g_freq * p.g_freq / p.omega_m;
}

// Roots of p3 a^3 + p2 a^2 + a - 1 = 0 (a = A / A_lin), as complex values.
std::vector<std::complex<double>> cubic_roots(double p3, double p2) {
  using cplx = std::complex<double>;
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  const bool reversed = p3 <= 1.0;
  if (reversed) {
    // b = 1/a: b^3 - b^2 - p2 b - p3 = 0, small coefficients.
    comp(0, 2) = p3;
    comp(1, 2) = p2;
    comp(2, 2) = 1.0;
  } else {
    comp(0, 2) = 1.0 / p3;
    comp(1, 2) = -1.0 / p3;
    comp(2, 2) = -p2 / p3;
  }
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
  if (es.info() != Eigen::Success)
    throw CubicError("steady_state: companion eigenvalue solve failed", {p3, p2, 1.0, -1.0});

  // Polish in the variable the companion matrix was built for; polishing
  // huge a directly loses them to cancellation and they drift onto the
  // physical root.
  auto f = [&](cplx x) {
    return reversed ? ((x - 1.0) * x - p2) * x - p3 : ((p3 * x + p2) * x + 1.0) * x - 1.0;
  };
  auto df = [&](cplx x) {
    return reversed ? (3.0 * x - 2.0) * x - p2 : (3.0 * p3 * x + 2.0 * p2) * x + 1.0;
  };
  std::vector<cplx> out;
  for (int i = 0; i < 3; ++i) {
    cplx x = es.eigenvalues()(i);
    for (int it = 0; it < 60; ++it) {
      const cplx d = df(x);
      if (std::abs(d) == 0.0) break;
      const cplx step = f(x) / d;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    if (reversed) {
      if (std::abs(x) == 0.0) continue;  // root at infinity
      x = 1.0 / x;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(kappa_in) && kappa_in > 0.0, "kappa_in must be > 0");
  require(std::isfinite(kappa_loss) && kappa_loss >= 0.0, "kappa_loss must be >= 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(std::isfinite(omega_m) && omega_m > 0.0, "omega_m must be > 0");
  require(std::isfinite(mass) && mass > 0.0, "mass must be > 0");
  require(std::isfinite(temperature) && temperature >= 0.0, "temperature must be >= 0");
  require(std::isfinite(g_freq) && g_freq >= 0.0, "g_freq must be >= 0");
  require(std::isfinite(power) && power >= 0.0, "power must be >= 0");
  require(std::isfinite(delta0), "delta0 must be finite");
  require(std::isfinite(omega_laser) && omega_laser > 0.0, "omega_laser must be > 0");
  require(std::isfinite(cutoff) && cutoff > 0.0, "cutoff must be > 0");
}

SystemParams SystemParams::rossi() {
  SystemParams p;
  const double kappa = kTwoPi * 18.5e6;
  p.kappa_in = 0.5 * kappa;
  p.kappa_loss = 0.5 * kappa;
  p.gamma = kTwoPi * 130.0;
  p.omega_m = kTwoPi * 1.14e6;
  p.mass = 16e-12;
  p.temperature = 11.0;
  p.g_freq = kTwoPi * 129.0;
  p.power = 1e-6;
  p.delta0 = -2.0 * kappa;
  p.omega_laser = kTwoPi * constants::kSpeedOfLight / 852e-9;
  p.cutoff = 5.0 * p.omega_m;
  return p;
}

double coupling_to_si(double g_freq, double mass, double omega_m) {
  if (!(mass > 0.0) || !(omega_m > 0.0) || !(g_freq >= 0.0))
    throw DomainError("coupling_to_si: inputs must be positive");
  return g_freq * std::sqrt(2.0 * mass * omega_m / kHbar);
}

double drive_amplitude(const SystemParams& p, bool epsilon_uses_total_kappa) {
  const double k = epsilon_uses_total_kappa ? p.kappa() : p.kappa_in;
  return std::sqrt(2.0 * k * p.power / (kHbar * p.omega_laser));
}

SteadyState steady_state(const SystemParams& p, const SteadyStateOptions& opt) {
  p.validate();
  SteadyState ss;
  ss.epsilon = drive_amplitude(p, opt.epsilon_uses_total_kappa);
  const double kappa = p.kappa();
  const double lorentz = p.delta0 * p.delta0 + 0.25 * kappa * kappa;
  const double c = shift_coefficient(p);
  const double eps2 = ss.epsilon * ss.epsilon;

  auto finish = [&](double a_abs2) {
    ss.alpha_abs2 = a_abs2;
    ss.alpha = std::sqrt(a_abs2);
    ss.delta_eff = p.delta0 - c * a_abs2;
    ss.q0 = kHbar * coupling_to_si(p.g_freq, p.mass, p.omega_m) * a_abs2 / (p.mass * p.omega_m * p.omega_m);
    const double lhs = a_abs2 * (0.25 * kappa * kappa + ss.delta_eff * ss.delta_eff);
    ss.residual_laser = eps2 > 0.0 ? std::abs(lhs - eps2) / eps2 : std::abs(lhs);
    const double g_si = coupling_to_si(p.g_freq, p.mass, p.omega_m);
    ss.residual_delta = std::abs(ss.delta_eff - (p.delta0 - g_si * ss.q0)) /
                        std::max(std::abs(p.delta0), kappa);
    ss.stable = is_stable(drift_matrix(p, ss.alpha, ss.delta_eff));
    return ss;
  };

  if (eps2 == 0.0) {
    ss.roots = {0.0};
    ss.branch_count = 1;
    return finish(0.0);
  }

  const double a_lin = eps2 / lorentz;
  const double p3 = c * c * a_lin * a_lin / lorentz;
  const double p2 = -2.0 * p.delta0 * c * a_lin / lorentz;

  std::vector<double> roots;
  if (p3 == 0.0) {
    roots.push_back(a_lin);
  } else {
    for (const auto& a : cubic_roots(p3, p2)) {
      if (std::abs(a.imag()) <= 1e-9 * std::abs(a) && a.real() > 0.0) roots.push_back(a.real() * a_lin);
    }
    std::sort(roots.begin(), roots.end());
    if (roots.empty())
      throw CubicError("steady_state: no positive real root", {c * c, -2.0 * p.delta0 * c, lorentz, -eps2});
  }
  ss.roots = roots;
  ss.branch_count = static_cast<int>(roots.size());

  if (roots.size() == 1) return finish(roots.front());

  std::vector<double> stable_roots;
  for (double r : roots)
    if (is_stable(drift_matrix(p, std::sqrt(r), p.delta0 - c * r))) stable_roots.push_back(r);

  switch (opt.branch) {
    case BranchPolicy::kRequireUnique: {
      std::ostringstream msg;
      msg.precision(10);
      msg << "steady_state: power inside the bistable window, " << roots.size()
          << " roots for |alpha|^2:";
      for (double r : roots) msg << ' ' << r;
      throw AmbiguityError(msg.str(), roots);
    }
    case BranchPolicy::kLowestStable:
      return finish(stable_roots.empty() ? roots.front() : stable_roots.front());
    case BranchPolicy::kHighestStable:
      return finish(stable_roots.empty() ? roots.back() : stable_roots.back());
  }
  return finish(roots.front());
}

SteadyStateDerivative steady_state_derivative(const SystemParams& p, const SteadyState& ss) {
  const double kappa = p.kappa();
  const double lorentz = p.delta0 * p.delta0 + 0.25 * kappa * kappa;
  const double c = shift_coefficient(p);
  const double dc = 4.0 * p.g_freq / p.omega_m;
  const double a = ss.alpha_abs2;
  const double df_da = 3.0 * c * c * a * a - 4.0 * p.delta0 * c * a + lorentz;
  const double df_dc = 2.0 * c * a * a * a - 2.0 * p.delta0 * a * a;
  if (std::abs(df_da) <= 1e-12 * lorentz)
    throw DerivativeUndefinedError("steady_state_derivative: steady state sits on a fold");
  SteadyStateDerivative d;
  d.dalpha_abs2 = -df_dc * dc / df_da;
  d.dalpha = ss.alpha > 0.0 ? d.dalpha_abs2 / (2.0 * ss.alpha) : 0.0;
  d.ddelta_eff = -(dc * a + c * d.dalpha_abs2);
  return d;
}

BistabilityWindow bistability_window(const SystemParams& p, const SteadyStateOptions& opt) {
  p.validate();
  BistabilityWindow w;
  const double g_si = coupling_to_si(p.g_freq, p.mass, p.omega_m);
  const double kappa = p.kappa();
  const double d = p.delta0;
  const double radicand = 4.0 * d * d - 3.0 * kappa * kappa;
  if (g_si == 0.0 || radicand < 0.0 || d <= 0.0) return w;

  const double k_eps = opt.epsilon_uses_total_kappa ? kappa : p.kappa_in;
  const double pref = p.mass * p.omega_laser * p.omega_m * p.omega_m / (216.0 * g_si * g_si * k_eps);
  const double base = 2.0 * d * (4.0 * d * d + 9.0 * kappa * kappa);
  const double root = std::sqrt(radicand * radicand * radicand);
  const double lo = pref * (base - root);
  const double hi = pref * (base + root);
  if (!(lo > 0.0)) return w;
  w.p_minus = lo;
  w.p_plus = hi;
  w.monostable_for_all_power = false;
  return w;
}

bool is_stable(const Eigen::Matrix4d& a) {
  if (!a.allFinite()) throw NumericalError("is_stable: non-finite drift matrix");
  Eigen::EigenSolver<Eigen::Matrix4d> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("is_stable: eigenvalue solver failed");
  return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace omfisher
