#pragma once

namespace omfisher {

struct SystemParams;

// Ohmic bath with exponential cutoff.
struct BathSpec {
  double mass = 0.0;
  double gamma = 0.0;
  double temperature = 0.0;
  double cutoff = 0.0;

  void validate() const;
  static BathSpec from(const SystemParams& p);
};

// Kernel values at one lag. Closed-form evaluations leave abs_error_estimate at 0.
struct KernelValue {
  double tau = 0.0;
  double d_r = 0.0;
  double d_i = 0.0;
  double abs_error_estimate = 0.0;
};

// J(w) = (2 m gamma / pi) w exp(-w / cutoff).
double spectral_density(const BathSpec& bath, double omega);

// J(w) coth(hbar w / 2 kB T), with the removable w -> 0 limit and the
// T = 0 limit handled.
double noise_weight(const BathSpec& bath, double omega);

// Closed forms. kernel_dr and kernel_di both fill d_r and d_i.
KernelValue kernel_dr(const BathSpec& bath, double tau);
KernelValue kernel_di(const BathSpec& bath, double tau);

// Adaptive quadrature of the defining cosine/sine transforms. rel_tol is
// relative to the value; only the requested component is filled.
KernelValue kernel_dr_numeric(const BathSpec& bath, double tau, double rel_tol = 1e-10);
KernelValue kernel_di_numeric(const BathSpec& bath, double tau, double rel_tol = 1e-10);

}  // namespace omfisher
