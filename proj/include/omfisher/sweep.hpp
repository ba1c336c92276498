#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omfisher/config.hpp"

namespace omfisher {

// One panel of a figure preset: a sweep plus the panel's name.
struct Panel {
  std::string name;
  SweepSpec sweep;
  std::string note;  // how the range was chosen; emitted as metadata
};

struct SweepRow {
  std::string panel;
  std::string variable;
  std::string series;
  double value = 0.0;
  bool stable = false;
  double alpha_abs2 = 0.0;
  std::optional<FisherReport> fisher;  // empty when unstable
  double lyapunov_residual = 0.0;
  double diffusion_abs_error = 0.0;
};

struct SweepTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<SweepRow> rows;
};

std::vector<std::string> preset_names();

// Panels for fig1, fig2, fig2a, fig2b, fig3, fig3a, fig3b, fig4, fig4a..d, fig5.
// Ranges that depend on stability are resolved against `base`.
std::vector<Panel> preset_panels(const std::string& name, const Scenario& base, const ModelOptions& opt);

// True when the selected steady state exists, is unique under the branch
// policy and the drift matrix is Hurwitz.
bool scenario_stable(const Scenario& s, const ModelOptions& opt);

// Value of `v` (config units) at which the system leaves the stable region
// when moving from the baseline towards `towards`; empty if it never does.
std::optional<double> stability_boundary(const Scenario& base, const ModelOptions& opt, SweepVariable v,
                                         double towards, GridScale scale);

// Throws PreconditionError unless the baseline is stable and monostable.
void check_baseline(const Scenario& s, const ModelOptions& opt);

// Evaluates every grid point in grid order. Numerical failures raise
// NumericalError naming the point. OMFISHER_THREADS caps the worker count.
SweepTable run_sweep(const RunConfig& config);
SweepTable run_panels(const RunConfig& config, const std::vector<Panel>& panels, const std::string& label);

std::vector<std::string> csv_header();
void write_csv(std::ostream& out, const SweepTable& table);
void write_json(std::ostream& out, const SweepTable& table);

}  // namespace omfisher
