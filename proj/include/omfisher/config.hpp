#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omfisher/pipeline.hpp"

namespace omfisher {

// Parameter point in the units used by config files. Detuning, filter
// centre and window are stored relative to kappa so they track it when
// kappa is swept; the bath cutoff is stored relative to omega_m.
struct Scenario {
  double kappa = 0.0;             // total, rad/s
  double kappa_in_fraction = 0.5;
  double gamma = 0.0;
  double omega_m = 0.0;
  double mass = 0.0;
  double temperature = 0.0;
  double g_freq = 0.0;
  double power = 0.0;
  double delta0_over_kappa = 0.0;
  double omega_laser = 0.0;
  double cutoff_over_omega_m = 5.0;
  double omega_k_over_kappa = 0.0;
  double window_times_kappa = 1.0;
  double eta = 1.0;
  std::optional<double> theta;  // empty: theta_max

  static Scenario rossi();
  SystemParams params() const;
  MeasurementSettings measurement() const;
};

enum class SweepVariable { kOmegaK, kTheta, kEta, kKappa, kGamma, kPower, kG, kTemperature, kDelta0 };
enum class GridScale { kLinear, kLog };

// Sweep values are in the variable's config units: omega_k and delta0 in
// units of kappa, kappa/gamma/g as f/2pi in Hz, power in W, temperature in K,
// theta in rad.
struct GridSpec {
  GridScale scale = GridScale::kLinear;
  double start = 0.0;
  double stop = 0.0;
  int points = 2;

  std::vector<double> values() const;
};

struct SeriesValue {
  std::string label;
  std::optional<double> value;  // empty only for theta = auto
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::kOmegaK;
  GridSpec grid;
  std::optional<SweepVariable> series_variable;
  std::vector<SeriesValue> series;
};

enum class OutputFormat { kCsv, kJson };

struct RunConfig {
  Scenario scenario;
  bool has_sweep = false;
  SweepSpec sweep;
  ModelOptions options;
  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::kCsv;
};

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

// Apply a sweep value (config units) to a scenario.
void apply(Scenario& s, SweepVariable v, std::optional<double> value);

// INI-style key = value file with [system], [measurement], [sweep],
// [switches], [numerics] and [output] sections. Unknown keys and
// malformed values raise ConfigError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_string(const std::string& text);

// Throws ConfigError naming the offending field.
void validate(const RunConfig& c);

}  // namespace omfisher
