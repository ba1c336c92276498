#include "omfisher/noise_kernels.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/params.hpp"
#include "omfisher/quadrature.hpp"
#include "omfisher/special_functions.hpp"

namespace omfisher {

using constants::kBoltzmann;
using constants::kHbar;
using constants::kPi;

namespace {

double prefactor(const BathSpec& b) { return 2.0 * b.mass * b.gamma / kPi; }

// Breakpoints in u = w / cutoff: one per oscillation period of cos(x u),
// plus a few decades for the exp(-u) envelope.
std::vector<double> panel_points(double x) {
  constexpr double kUpper = 60.0;
  std::vector<double> pts{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, kUpper};
  const double ax = std::abs(x);
  if (ax > 0.0) {
    const double period = 2.0 * kPi / ax;
    const double step = std::max(period, kUpper / 4000.0);
    for (double u = step; u < kUpper; u += step) pts.push_back(u);
  }
  return pts;
}

template <class F>
KernelValue transform(const BathSpec& bath, double tau, double rel_tol, F&& weight_times_trig,
                      bool real_part) {
  bath.validate();
  if (!(rel_tol > 0.0)) throw DomainError("kernel quadrature: tol must be > 0");
  const double x = bath.cutoff * tau;
  quad::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-300;
  opt.max_panels = 20000;
  auto r = quad::integrate(weight_times_trig, panel_points(x), opt);
  KernelValue kv;
  kv.tau = tau;
  const double value = bath.cutoff * r.value;
  const double err = bath.cutoff * r.abs_error;
  if (!r.converged)
    throw QuadratureError("kernel quadrature did not converge", value, err);
  (real_part ? kv.d_r : kv.d_i) = value;
  kv.abs_error_estimate = err;
  return kv;
}

}  // namespace

void BathSpec::validate() const {
  if (!(mass > 0.0) || !(gamma > 0.0) || !(cutoff > 0.0) || !(temperature >= 0.0) ||
      !std::isfinite(mass) || !std::isfinite(gamma) || !std::isfinite(cutoff) ||
      !std::isfinite(temperature))
    throw DomainError("BathSpec: mass, gamma, cutoff must be > 0 and temperature >= 0");
}

BathSpec BathSpec::from(const SystemParams& p) {
  return BathSpec{p.mass, p.gamma, p.temperature, p.cutoff};
}

double spectral_density(const BathSpec& bath, double omega) {
  if (!(omega >= 0.0)) throw DomainError("spectral_density: omega must be >= 0");
  return prefactor(bath) * omega * std::exp(-omega / bath.cutoff);
}

double noise_weight(const BathSpec& bath, double omega) {
  if (!(omega >= 0.0)) throw DomainError("noise_weight: omega must be >= 0");
  const double env = prefactor(bath) * std::exp(-omega / bath.cutoff);
  if (bath.temperature == 0.0) return env * omega;
  const double a = kHbar / (2.0 * kBoltzmann * bath.temperature);
  return env * x_coth_x(a * omega) / a;
}

KernelValue kernel_dr(const BathSpec& bath, double tau) {
  bath.validate();
  const double om = bath.cutoff;
  const double x = om * tau;
  const double d = 1.0 + x * x;
  KernelValue kv;
  kv.tau = tau;
  // Psi'(z) + Psi'(z*) - 2 Re 1/z^2 = 2 Re Psi'(z+1), finite as T -> 0.
  double thermal = 0.0;
  if (bath.temperature > 0.0) {
    const double kt = kBoltzmann * bath.temperature / kHbar;  // rad/s
    const std::complex<double> z = std::complex<double>(1.0, -x) * (kt / om);
    thermal = 2.0 * kt * kt * trigamma_complex(z + 1.0).real();
  }
  kv.d_r = prefactor(bath) * (om * om * (1.0 - x * x) / (d * d) + thermal);
  kv.d_i = prefactor(bath) * 2.0 * om * om * x / (d * d);
  return kv;
}

KernelValue kernel_di(const BathSpec& bath, double tau) { return kernel_dr(bath, tau); }

KernelValue kernel_dr_numeric(const BathSpec& bath, double tau, double rel_tol) {
  const double x = bath.cutoff * tau;
  return transform(
      bath, tau, rel_tol,
      [&](double u) { return noise_weight(bath, bath.cutoff * u) * std::cos(x * u); }, true);
}

KernelValue kernel_di_numeric(const BathSpec& bath, double tau, double rel_tol) {
  const double x = bath.cutoff * tau;
  return transform(
      bath, tau, rel_tol,
      [&](double u) { return spectral_density(bath, bath.cutoff * u) * std::sin(x * u); }, false);
}

}  // namespace omfisher
