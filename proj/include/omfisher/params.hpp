#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace omfisher {

// Physical parameters in SI units. Rates are angular [rad/s].
struct SystemParams {
  double kappa_in = 0.0;
  double kappa_loss = 0.0;
  double gamma = 0.0;
  double omega_m = 0.0;
  double mass = 0.0;
  double temperature = 0.0;
  double g_freq = 0.0;  // coupling in frequency units; g_si = g_freq*sqrt(2 m omega_m / hbar)
  double power = 0.0;
  double delta0 = 0.0;  // omega_c - omega_L
  double omega_laser = 0.0;
  double cutoff = 0.0;

  double kappa() const { return kappa_in + kappa_loss; }

  // Throws DomainError naming the first violated invariant.
  void validate() const;

  // Reference point: kappa/2pi = 18.5 MHz split evenly into in/loss,
  // gamma/2pi = 130 Hz, omega_m/2pi = 1.14 MHz, m = 16 ng, T = 11 K,
  // g/2pi = 129 Hz, P = 1 uW, delta0 = -2 kappa, 852 nm, cutoff 5 omega_m.
  static SystemParams rossi();
};

enum class BranchPolicy {
  kRequireUnique,  // several physical roots -> AmbiguityError
  kLowestStable,
  kHighestStable,
};

struct SteadyStateOptions {
  bool epsilon_uses_total_kappa = false;
  BranchPolicy branch = BranchPolicy::kRequireUnique;
};

struct SteadyState {
  double alpha_abs2 = 0.0;
  double alpha = 0.0;       // real, >= 0
  double delta_eff = 0.0;   // rad/s
  double q0 = 0.0;          // m
  double epsilon = 0.0;     // rad/s
  int branch_count = 0;
  bool stable = false;
  std::vector<double> roots;  // every positive real |alpha|^2, ascending
  double residual_laser = 0.0;
  double residual_delta = 0.0;
};

struct BistabilityWindow {
  std::optional<double> p_minus;
  std::optional<double> p_plus;
  bool monostable_for_all_power = true;
};

// g-derivatives of the selected steady state at fixed drive power.
struct SteadyStateDerivative {
  double dalpha_abs2 = 0.0;
  double dalpha = 0.0;
  double ddelta_eff = 0.0;
};

double coupling_to_si(double g_freq, double mass, double omega_m);
double drive_amplitude(const SystemParams& p, bool epsilon_uses_total_kappa);

SteadyState steady_state(const SystemParams& p, const SteadyStateOptions& opt = {});
SteadyStateDerivative steady_state_derivative(const SystemParams& p, const SteadyState& ss);

BistabilityWindow bistability_window(const SystemParams& p, const SteadyStateOptions& opt = {});

// True iff every eigenvalue has negative real part.
bool is_stable(const Eigen::Matrix4d& a);

}  // namespace omfisher
