#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/params.hpp"

using namespace omfisher;
using constants::kHbar;
using constants::kTwoPi;

TEST_CASE("coupling conversion") {
  CHECK(coupling_to_si(0.0, 16e-12, kTwoPi * 1.14e6) == 0.0);
  const double expect = kTwoPi * 129 * std::sqrt(2 * 16e-12 * kTwoPi * 1.14e6 / kHbar);
  CHECK(coupling_to_si(kTwoPi * 129, 16e-12, kTwoPi * 1.14e6) == doctest::Approx(expect).epsilon(1e-15));
  CHECK_THROWS_AS(coupling_to_si(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("validation names the offending field") {
  SystemParams p = SystemParams::rossi();
  p.mass = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("mass"), DomainError);
}

TEST_CASE("undriven cavity") {
  SystemParams p = SystemParams::rossi();
  p.power = 0.0;
  const SteadyState ss = steady_state(p);
  CHECK(ss.alpha_abs2 == 0.0);
  CHECK(ss.q0 == 0.0);
  CHECK(ss.delta_eff == p.delta0);
}

TEST_CASE("g = 0 gives the linear-cavity Lorentzian") {
  SystemParams p = SystemParams::rossi();
  p.g_freq = 0.0;
  const SteadyState ss = steady_state(p);
  const double eps = drive_amplitude(p, false);
  const double k = p.kappa();
  CHECK(ss.alpha_abs2 == doctest::Approx(eps * eps / (p.delta0 * p.delta0 + k * k / 4)).epsilon(1e-14));
}

TEST_CASE("reference point: unique root, independent cubic solve") {
  const SystemParams p = SystemParams::rossi();
  const SteadyState ss = steady_state(p);
  CHECK(ss.branch_count == 1);
  CHECK(ss.stable);
  CHECK(ss.residual_laser < 1e-10);
  CHECK(ss.residual_delta < 1e-10);

  // Oracle: companion matrix of the unscaled cubic in A, then one Newton
  // step in long double.
  const double c = 2 * p.g_freq * p.g_freq / p.omega_m;
  const double k = p.kappa();
  const double eps2 = std::pow(drive_amplitude(p, false), 2);
  const double L = p.delta0 * p.delta0 + k * k / 4;
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(1, 0) = comp(2, 1) = 1.0;
  comp(0, 2) = eps2 / (c * c);
  comp(1, 2) = -L / (c * c);
  comp(2, 2) = 2 * p.delta0 / c;
  const Eigen::Vector3cd ev = Eigen::EigenSolver<Eigen::Matrix3d>(comp).eigenvalues();
  int real_positive = 0;
  double root = 0.0;
  for (int i = 0; i < 3; ++i)
    if (std::abs(ev(i).imag()) < 1e-6 * std::abs(ev(i)) && ev(i).real() > 0) {
      ++real_positive;
      root = ev(i).real();
    }
  REQUIRE(real_positive == 1);
  long double a = root;
  const long double f = ((c * c * a - 2 * p.delta0 * c) * a + L) * a - eps2;
  const long double df = (3 * c * c * a - 4 * p.delta0 * c) * a + L;
  a -= f / df;
  CHECK(ss.alpha_abs2 == doctest::Approx(double(a)).epsilon(1e-12));
}

TEST_CASE("bistable window: ambiguity unless a branch policy is set") {
  SystemParams p = SystemParams::rossi();
  p.delta0 = 2.0 * p.kappa();
  const BistabilityWindow w = bistability_window(p);
  REQUIRE_FALSE(w.monostable_for_all_power);
  p.power = std::sqrt(*w.p_minus * *w.p_plus);
  CHECK_THROWS_AS(steady_state(p), AmbiguityError);
  SteadyStateOptions lo, hi;
  lo.branch = BranchPolicy::kLowestStable;
  hi.branch = BranchPolicy::kHighestStable;
  const SteadyState a = steady_state(p, lo), b = steady_state(p, hi);
  CHECK(a.branch_count == 3);
  CHECK(a.alpha_abs2 == a.roots.front());
  CHECK(a.stable);
  CHECK(b.stable);
  CHECK(b.alpha_abs2 >= a.alpha_abs2);
  CHECK(a.residual_laser < 1e-10);
  CHECK(b.residual_laser < 1e-10);
}

TEST_CASE("bistability window edge cases") {
  SystemParams p = SystemParams::rossi();
  p.delta0 = -0.5 * p.kappa();
  CHECK(bistability_window(p).monostable_for_all_power);
  p.delta0 = 0.5 * p.kappa();
  CHECK(bistability_window(p).monostable_for_all_power);
  p.g_freq = 0.0;
  p.delta0 = 3.0 * p.kappa();
  CHECK(bistability_window(p).monostable_for_all_power);
}

TEST_CASE("doubling g divides both window edges by 4") {
  SystemParams p = SystemParams::rossi();
  p.delta0 = 3.0 * p.kappa();
  const BistabilityWindow a = bistability_window(p);
  p.g_freq *= 2.0;
  const BistabilityWindow b = bistability_window(p);
  CHECK(*b.p_minus == doctest::Approx(*a.p_minus / 4).epsilon(1e-14));
  CHECK(*b.p_plus == doctest::Approx(*a.p_plus / 4).epsilon(1e-14));
}

TEST_CASE("tiny shift coefficients do not fabricate extra roots") {
  SystemParams p = SystemParams::rossi();
  for (double d : {-2.0, -10.0, -20.0}) {
    p.delta0 = d * p.kappa();
    for (double g : {1e-3, 1.0, 810.0}) {
      p.g_freq = g;
      CHECK(steady_state(p).branch_count == 1);
    }
  }
}

TEST_CASE("implicit derivative matches finite differences") {
  const SystemParams p = SystemParams::rossi();
  const SteadyStateDerivative d = steady_state_derivative(p, steady_state(p));
  const double h = 1e-3 * p.g_freq;
  SystemParams a = p, b = p;
  a.g_freq += h;
  b.g_freq -= h;
  const double fd = (steady_state(a).alpha_abs2 - steady_state(b).alpha_abs2) / (2 * h);
  CHECK(d.dalpha_abs2 == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("is_stable") {
  CHECK(is_stable(Eigen::Matrix4d(-Eigen::Matrix4d::Identity())));
  CHECK_FALSE(is_stable(Eigen::Matrix4d(Eigen::Matrix4d::Identity())));
}
