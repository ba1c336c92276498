#include "omfisher/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"

namespace omfisher {

using constants::kPi;
using constants::kTwoPi;

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// Current value of `v` in config units.
double current(const Scenario& s, SweepVariable v) {
  switch (v) {
    case SweepVariable::kOmegaK: return s.omega_k_over_kappa;
    case SweepVariable::kTheta: return s.theta.value_or(std::numeric_limits<double>::quiet_NaN());
    case SweepVariable::kEta: return s.eta;
    case SweepVariable::kKappa: return s.kappa / kTwoPi;
    case SweepVariable::kGamma: return s.gamma / kTwoPi;
    case SweepVariable::kPower: return s.power;
    case SweepVariable::kG: return s.g_freq / kTwoPi;
    case SweepVariable::kTemperature: return s.temperature;
    case SweepVariable::kDelta0: return s.delta0_over_kappa;
  }
  return 0.0;
}

SweepSpec make(SweepVariable v, GridScale scale, double start, double stop, int points) {
  SweepSpec s;
  s.variable = v;
  s.grid = {scale, start, stop, points};
  return s;
}

void add_series(SweepSpec& s, SweepVariable v, const std::vector<std::optional<double>>& values,
                const std::vector<std::string>& labels) {
  s.series_variable = v;
  for (std::size_t i = 0; i < values.size(); ++i) s.series.push_back({to_string(v) + "=" + labels[i], values[i]});
}

// Pull an unstable grid end back inside the stable region (2% inside in the
// grid's own coordinate).
std::string bound_by_stability(SweepSpec& s, const Scenario& base, const ModelOptions& opt) {
  GridSpec& g = s.grid;
  std::string note;
  auto inset = [&](double edge, double other) {
    if (g.scale == GridScale::kLog) return std::exp(std::log(edge) + 0.02 * (std::log(other) - std::log(edge)));
    return edge + 0.02 * (other - edge);
  };
  const double nominal = current(base, s.variable);
  if (auto b = stability_boundary(base, opt, s.variable, g.stop, g.scale)) {
    g.stop = inset(*b, nominal);
    note += "; stop clipped to stability boundary " + num(*b);
  }
  if (auto b = stability_boundary(base, opt, s.variable, g.start, g.scale)) {
    g.start = inset(*b, nominal);
    note += "; start clipped to stability boundary " + num(*b);
  }
  return note;
}

Panel fig1() {
  return {"fig1", make(SweepVariable::kOmegaK, GridScale::kLinear, -3.0, 3.0, 121), "omega_k/kappa in [-3, 3]"};
}

Panel fig2a() {
  SweepSpec s = make(SweepVariable::kTheta, GridScale::kLinear, 0.0, kPi * 179.0 / 180.0, 180);
  add_series(s, SweepVariable::kEta, {1.0, 0.8, 0.5}, {"1", "0.8", "0.5"});
  return {"fig2a", s, "theta in [0, pi) step pi/180"};
}

Panel fig2b() {
  SweepSpec s = make(SweepVariable::kEta, GridScale::kLinear, 0.05, 1.0, 96);
  add_series(s, SweepVariable::kTheta, {std::nullopt, kPi / 2}, {"auto", num(kPi / 2)});
  return {"fig2b", s, "eta in [0.05, 1]"};
}

Panel fig3a() {
  SweepSpec s = make(SweepVariable::kOmegaK, GridScale::kLinear, -3.0, 3.0, 121);
  add_series(s, SweepVariable::kDelta0, {-2.0, -5.0, -10.0}, {"-2", "-5", "-10"});
  return {"fig3a", s, "omega_k/kappa in [-3, 3]"};
}

Panel fig3b() {
  return {"fig3b", make(SweepVariable::kDelta0, GridScale::kLinear, -0.5, -20.0, 80),
          "delta0/kappa in [-20, -0.5]"};
}

Panel decade(const std::string& name, SweepVariable v, const Scenario& base, const ModelOptions& opt) {
  const double x = current(base, v);
  Panel p{name, make(v, GridScale::kLog, x / 10.0, x * 10.0, 41), "one decade either side of nominal"};
  p.note += bound_by_stability(p.sweep, base, opt);
  return p;
}

Panel fig4d(const Scenario& base, const ModelOptions& opt) {
  const double g0 = current(base, SweepVariable::kG);
  // Search outward for the threshold; cap at 1e4 g0.
  double hi = g0;
  std::optional<double> b;
  for (int i = 0; i < 14 && !b; ++i) {
    hi *= 2.0;
    b = stability_boundary(base, opt, SweepVariable::kG, hi, GridScale::kLinear);
  }
  Panel p{"fig4d", make(SweepVariable::kG, GridScale::kLinear, 0.0, 0.0, 41), ""};
  if (b) {
    p.sweep.grid.stop = 0.98 * *b;
    p.note = "g/2pi in [0, 0.98 g_threshold], g_threshold/2pi = " + num(*b) + " Hz";
  } else {
    p.sweep.grid.stop = hi;
    p.note = "no instability found up to g/2pi = " + num(hi) + " Hz";
  }
  return p;
}

Panel fig5() {
  SweepSpec s = make(SweepVariable::kTemperature, GridScale::kLog, 0.01, 100.0, 41);
  add_series(s, SweepVariable::kGamma, {130.0, 1300.0, 13000.0}, {"130", "1300", "13000"});
  return {"fig5", s, "T in [0.01, 100] K; gamma/2pi in {130, 1300, 13000} Hz"};
}

int worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OMFISHER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

struct Job {
  std::string panel;
  SweepVariable variable;
  std::string series;
  std::optional<SweepVariable> series_variable;
  std::optional<double> series_value;
  double value;
};

SweepRow evaluate_job(const Scenario& base, const ModelOptions& opt, const Job& job) {
  Scenario s = base;
  if (job.series_variable) apply(s, *job.series_variable, job.series_value);
  apply(s, job.variable, job.value);
  SweepRow row;
  row.panel = job.panel;
  row.variable = to_string(job.variable);
  row.series = job.series;
  row.value = job.value;
  const PointResult r = evaluate_point(s.params(), s.measurement(), opt);
  row.stable = r.base.stable;
  row.alpha_abs2 = r.base.steady.alpha_abs2;
  if (r.base.stable) {
    row.lyapunov_residual = r.base.sigma.residual;
    row.diffusion_abs_error = r.base.diffusion.abs_error;
  } else {
    row.lyapunov_residual = std::numeric_limits<double>::quiet_NaN();
    row.diffusion_abs_error = std::numeric_limits<double>::quiet_NaN();
  }
  row.fisher = r.fisher;
  return row;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig2a", "fig2b", "fig3", "fig3a", "fig3b",
          "fig4", "fig4a", "fig4b", "fig4c", "fig4d", "fig5"};
}

std::vector<Panel> preset_panels(const std::string& name, const Scenario& base, const ModelOptions& opt) {
  if (name == "fig1") return {fig1()};
  if (name == "fig2") return {fig2a(), fig2b()};
  if (name == "fig2a") return {fig2a()};
  if (name == "fig2b") return {fig2b()};
  if (name == "fig3") return {fig3a(), fig3b()};
  if (name == "fig3a") return {fig3a()};
  if (name == "fig3b") return {fig3b()};
  if (name == "fig4a") return {decade("fig4a", SweepVariable::kKappa, base, opt)};
  if (name == "fig4b") return {decade("fig4b", SweepVariable::kGamma, base, opt)};
  if (name == "fig4c") return {decade("fig4c", SweepVariable::kPower, base, opt)};
  if (name == "fig4d") return {fig4d(base, opt)};
  if (name == "fig4")
    return {decade("fig4a", SweepVariable::kKappa, base, opt), decade("fig4b", SweepVariable::kGamma, base, opt),
            decade("fig4c", SweepVariable::kPower, base, opt), fig4d(base, opt)};
  if (name == "fig5") return {fig5()};
  throw ConfigError("unknown preset '" + name + "'");
}

bool scenario_stable(const Scenario& s, const ModelOptions& opt) {
  try {
    const SystemParams p = s.params();
    p.validate();
    const SteadyState ss = steady_state(p, opt.steady);
    return is_stable(drift_matrix(p, ss));
  } catch (const AmbiguityError&) {
    return false;
  } catch (const DomainError&) {
    return false;
  }
}

std::optional<double> stability_boundary(const Scenario& base, const ModelOptions& opt, SweepVariable v,
                                         double towards, GridScale scale) {
  Scenario probe = base;
  apply(probe, v, towards);
  if (scenario_stable(probe, opt)) return std::nullopt;
  const bool log = scale == GridScale::kLog;
  auto to_u = [&](double x) { return log ? std::log(x) : x; };
  auto from_u = [&](double u) { return log ? std::exp(u) : u; };
  double good = to_u(current(base, v));
  double bad = to_u(towards);
  for (int i = 0; i < 200 && std::abs(bad - good) > 1e-12 * std::max(1.0, std::abs(bad)); ++i) {
    const double mid = 0.5 * (good + bad);
    apply(probe, v, from_u(mid));
    (scenario_stable(probe, opt) ? good : bad) = mid;
  }
  return from_u(bad);
}

void check_baseline(const Scenario& s, const ModelOptions& opt) {
  const SystemParams p = s.params();
  SteadyState ss;
  try {
    ss = steady_state(p, opt.steady);
  } catch (const AmbiguityError& e) {
    throw PreconditionError(std::string("baseline point is bistable (") + e.what() +
                            "); run `omfisher steady-state` to inspect the bistability window");
  }
  if (ss.branch_count > 1)
    throw PreconditionError("baseline point is bistable; run `omfisher steady-state` to inspect the bistability window");
  if (!is_stable(drift_matrix(p, ss)))
    throw PreconditionError("baseline point is dynamically unstable; run `omfisher steady-state` for details");
}

SweepTable run_panels(const RunConfig& config, const std::vector<Panel>& panels, const std::string& label) {
  validate(config);
  check_baseline(config.scenario, config.options);

  SweepTable table;
  auto& md = table.metadata;
  md.emplace_back("source", label);
  md.emplace_back("kappa_meas_mode", config.options.kappa_meas == KappaMeasMode::kKappaIn ? "kappa_in" : "kappa_total");
  md.emplace_back("cfi_convention", to_string(config.options.convention));
  md.emplace_back("vacuum_term", config.options.vacuum == VacuumTerm::kIntegrated ? "integrated" : "printed");
  md.emplace_back("derivative_method", to_string(config.options.derivative));
  md.emplace_back("epsilon_uses_total_kappa", config.options.steady.epsilon_uses_total_kappa ? "true" : "false");

  std::vector<Job> jobs;
  for (const Panel& p : panels) {
    const SweepSpec& s = p.sweep;
    const std::string prefix = "panel." + p.name + ".";
    md.emplace_back(prefix + "variable", to_string(s.variable));
    md.emplace_back(prefix + "grid", std::string(s.grid.scale == GridScale::kLog ? "log" : "linear") + " " +
                                         num(s.grid.start) + " " + num(s.grid.stop) + " " +
                                         std::to_string(s.grid.points));
    if (s.series_variable) md.emplace_back(prefix + "series_variable", to_string(*s.series_variable));
    if (!p.note.empty()) md.emplace_back(prefix + "range", p.note);

    const std::vector<double> values = s.grid.values();
    std::vector<SeriesValue> series = s.series;
    if (series.empty()) series.push_back({"", std::nullopt});
    for (const SeriesValue& sv : series)
      for (double v : values)
        jobs.push_back({p.name, s.variable, sv.label, s.series_variable, sv.value, v});
  }

  table.rows.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        table.rows[i] = evaluate_job(config.scenario, config.options, jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = worker_count(jobs.size());
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      what = e.what();
    }
    const Job& j = jobs[i];
    throw NumericalError("sweep failed at panel " + j.panel + (j.series.empty() ? "" : ", " + j.series) + ", " +
                         to_string(j.variable) + "=" + num(j.value) + ": " + what);
  }
  return table;
}

SweepTable run_sweep(const RunConfig& config) {
  if (!config.has_sweep) throw ConfigError("config: no [sweep] section and no preset given");
  return run_panels(config, {Panel{"custom", config.sweep, ""}}, "config");
}

std::vector<std::string> csv_header() {
  return {"panel", "variable", "series", "value", "stable", "alpha_abs2", "qfi", "qfi_exact", "cfi",
          "cfi_ideal", "theta", "theta_max", "lambda_max", "saturation_ratio", "saturation_ratio_exact",
          "lyapunov_residual", "diffusion_abs_error"};
}

void write_csv(std::ostream& out, const SweepTable& table) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << ": " << v << "\n";
  const auto header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const SweepRow& r : table.rows) {
    out << r.panel << "," << r.variable << "," << r.series << "," << num(r.value) << ","
        << (r.stable ? "true" : "false") << "," << num(r.alpha_abs2);
    if (r.fisher) {
      const FisherReport& f = *r.fisher;
      for (double x : {f.qfi, f.qfi_exact, f.cfi, f.cfi_ideal, f.theta, f.theta_max, f.lambda_max,
                       f.saturation_ratio, f.saturation_ratio_exact})
        out << "," << num(x);
    } else {
      out << ",,,,,,,,,";
    }
    out << "," << num(r.lyapunov_residual) << "," << num(r.diffusion_abs_error) << "\n";
  }
}

void write_json(std::ostream& out, const SweepTable& table) {
  using nlohmann::ordered_json;
  auto number = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };
  ordered_json doc;
  doc["metadata"] = ordered_json::object();
  for (const auto& [k, v] : table.metadata) doc["metadata"][k] = v;
  doc["rows"] = ordered_json::array();
  for (const SweepRow& r : table.rows) {
    ordered_json row;
    row["panel"] = r.panel;
    row["variable"] = r.variable;
    row["series"] = r.series;
    row["value"] = number(r.value);
    row["stable"] = r.stable;
    row["alpha_abs2"] = number(r.alpha_abs2);
    const auto f = r.fisher;
    auto field = [&](double FisherReport::*m) { return f ? number((*f).*m) : ordered_json(nullptr); };
    row["qfi"] = field(&FisherReport::qfi);
    row["qfi_exact"] = field(&FisherReport::qfi_exact);
    row["cfi"] = field(&FisherReport::cfi);
    row["cfi_ideal"] = field(&FisherReport::cfi_ideal);
    row["theta"] = field(&FisherReport::theta);
    row["theta_max"] = field(&FisherReport::theta_max);
    row["lambda_max"] = field(&FisherReport::lambda_max);
    row["saturation_ratio"] = field(&FisherReport::saturation_ratio);
    row["saturation_ratio_exact"] = field(&FisherReport::saturation_ratio_exact);
    row["lyapunov_residual"] = number(r.lyapunov_residual);
    row["diffusion_abs_error"] = number(r.diffusion_abs_error);
    doc["rows"].push_back(row);
  }
  out << doc.dump(2) << "\n";
}

}  // namespace omfisher
