#include "omfisher/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"

namespace omfisher {

using constants::kTwoPi;

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_number(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x))
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

template <class E>
E to_enum(const std::string& key, const std::string& raw, const std::map<std::string, E>& table) {
  const std::string v = lower(trim(raw));
  const auto it = table.find(v);
  if (it == table.end()) {
    std::string allowed;
    for (const auto& [name, _] : table) allowed += (allowed.empty() ? "" : "|") + name;
    throw ConfigError("config: '" + key + "' must be one of " + allowed + ", got '" + v + "'");
  }
  return it->second;
}

std::optional<double> to_theta(const std::string& key, const std::string& raw) {
  if (lower(trim(raw)) == "auto") return std::nullopt;
  return to_number(key, raw);
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::map<std::string, SweepVariable>& variable_table() {
  static const std::map<std::string, SweepVariable> t{
      {"omega_k", SweepVariable::kOmegaK}, {"theta", SweepVariable::kTheta},
      {"eta", SweepVariable::kEta},        {"kappa", SweepVariable::kKappa},
      {"gamma", SweepVariable::kGamma},    {"power", SweepVariable::kPower},
      {"g", SweepVariable::kG},            {"temperature", SweepVariable::kTemperature},
      {"delta0", SweepVariable::kDelta0}};
  return t;
}

RunConfig from_tree(const pt::ptree& tree) {
  RunConfig c;
  c.scenario = Scenario::rossi();
  Scenario& s = c.scenario;
  ModelOptions& o = c.options;
  std::optional<std::string> series_values;

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      const std::string v = node.data();
      const std::string full = section + "." + key;
      if (section == "system") {
        if (key == "kappa_over_2pi_hz") s.kappa = kTwoPi * to_number(full, v);
        else if (key == "kappa_in_fraction") s.kappa_in_fraction = to_number(full, v);
        else if (key == "gamma_over_2pi_hz") s.gamma = kTwoPi * to_number(full, v);
        else if (key == "omega_m_over_2pi_hz") s.omega_m = kTwoPi * to_number(full, v);
        else if (key == "mass_kg") s.mass = to_number(full, v);
        else if (key == "temperature_k") s.temperature = to_number(full, v);
        else if (key == "g_over_2pi_hz") s.g_freq = kTwoPi * to_number(full, v);
        else if (key == "power_w") s.power = to_number(full, v);
        else if (key == "delta0_over_kappa") s.delta0_over_kappa = to_number(full, v);
        else if (key == "wavelength_m") s.omega_laser = kTwoPi * constants::kSpeedOfLight / to_number(full, v);
        else if (key == "cutoff_over_omega_m") s.cutoff_over_omega_m = to_number(full, v);
        else throw ConfigError("config: unknown key '" + full + "'");
      } else if (section == "measurement") {
        if (key == "omega_k_over_kappa") s.omega_k_over_kappa = to_number(full, v);
        else if (key == "window_times_kappa") s.window_times_kappa = to_number(full, v);
        else if (key == "eta") s.eta = to_number(full, v);
        else if (key == "theta") s.theta = to_theta(full, v);
        else throw ConfigError("config: unknown key '" + full + "'");
      } else if (section == "sweep") {
        c.has_sweep = true;
        if (key == "variable") c.sweep.variable = to_enum(full, v, variable_table());
        else if (key == "scale")
          c.sweep.grid.scale = to_enum<GridScale>(full, v, {{"linear", GridScale::kLinear}, {"log", GridScale::kLog}});
        else if (key == "start") c.sweep.grid.start = to_number(full, v);
        else if (key == "stop") c.sweep.grid.stop = to_number(full, v);
        else if (key == "points") {
          const double n = to_number(full, v);
          if (n != std::floor(n) || n < 0 || n > 1e7) throw ConfigError("config: 'sweep.points' must be a count");
          c.sweep.grid.points = static_cast<int>(n);
        } else if (key == "series_variable") c.sweep.series_variable = to_enum(full, v, variable_table());
        else if (key == "series_values") series_values = v;
        else throw ConfigError("config: unknown key '" + full + "'");
      } else if (section == "switches") {
        if (key == "epsilon_uses_total_kappa") o.steady.epsilon_uses_total_kappa = to_bool(full, v);
        else if (key == "kappa_meas_mode")
          o.kappa_meas = to_enum<KappaMeasMode>(full, v, {{"kappa_in", KappaMeasMode::kKappaIn},
                                                          {"kappa_total", KappaMeasMode::kKappaTotal}});
        else if (key == "cfi_convention")
          o.convention = to_enum<CfiConvention>(full, v, {{"bhd_limit", CfiConvention::kBhdLimit},
                                                          {"printed_ideal", CfiConvention::kPrintedIdeal}});
        else if (key == "vacuum_term")
          o.vacuum = to_enum<VacuumTerm>(full, v, {{"integrated", VacuumTerm::kIntegrated},
                                                   {"printed", VacuumTerm::kPrinted}});
        else if (key == "branch_policy")
          o.steady.branch = to_enum<BranchPolicy>(full, v, {{"require_unique", BranchPolicy::kRequireUnique},
                                                            {"lowest_stable", BranchPolicy::kLowestStable},
                                                            {"highest_stable", BranchPolicy::kHighestStable}});
        else if (key == "derivative_method")
          o.derivative = to_enum<DerivativeMethod>(
              full, v, {{"finite_difference", DerivativeMethod::kFiniteDifference},
                        {"derivative_lyapunov", DerivativeMethod::kDerivativeLyapunov}});
        else throw ConfigError("config: unknown key '" + full + "'");
      } else if (section == "numerics") {
        if (key == "diffusion_rel_tol") o.diffusion.rel_tol = to_number(full, v);
        else if (key == "fd_h_rel") o.fd.h_rel = to_number(full, v);
        else if (key == "fd_h_floor") o.fd.h_floor = to_number(full, v);
        else throw ConfigError("config: unknown key '" + full + "'");
      } else if (section == "output") {
        if (key == "path") c.output_path = trim(v);
        else if (key == "format")
          c.format = to_enum<OutputFormat>(full, v, {{"csv", OutputFormat::kCsv}, {"json", OutputFormat::kJson}});
        else throw ConfigError("config: unknown key '" + full + "'");
      } else {
        throw ConfigError("config: unknown section '[" + section + "]'");
      }
    }
  }

  if (series_values) {
    if (!c.sweep.series_variable) throw ConfigError("config: 'sweep.series_values' needs 'sweep.series_variable'");
    for (const auto& item : split_list(*series_values)) {
      SeriesValue sv;
      sv.label = to_string(*c.sweep.series_variable) + "=" + item;
      if (*c.sweep.series_variable == SweepVariable::kTheta)
        sv.value = to_theta("sweep.series_values", item);
      else
        sv.value = to_number("sweep.series_values", item);
      c.sweep.series.push_back(sv);
    }
  }
  validate(c);
  return c;
}

}  // namespace

Scenario Scenario::rossi() {
  const SystemParams p = SystemParams::rossi();
  Scenario s;
  s.kappa = p.kappa();
  s.kappa_in_fraction = p.kappa_in / p.kappa();
  s.gamma = p.gamma;
  s.omega_m = p.omega_m;
  s.mass = p.mass;
  s.temperature = p.temperature;
  s.g_freq = p.g_freq;
  s.power = p.power;
  s.delta0_over_kappa = p.delta0 / p.kappa();
  s.omega_laser = p.omega_laser;
  s.cutoff_over_omega_m = p.cutoff / p.omega_m;
  return s;
}

SystemParams Scenario::params() const {
  SystemParams p;
  p.kappa_in = kappa_in_fraction * kappa;
  p.kappa_loss = kappa - p.kappa_in;
  p.gamma = gamma;
  p.omega_m = omega_m;
  p.mass = mass;
  p.temperature = temperature;
  p.g_freq = g_freq;
  p.power = power;
  p.delta0 = delta0_over_kappa * kappa;
  p.omega_laser = omega_laser;
  p.cutoff = cutoff_over_omega_m * omega_m;
  return p;
}

MeasurementSettings Scenario::measurement() const {
  MeasurementSettings m;
  m.omega_k = omega_k_over_kappa * kappa;
  m.window = window_times_kappa / kappa;
  m.eta = eta;
  m.theta = theta;
  return m;
}

std::vector<double> GridSpec::values() const {
  std::vector<double> v;
  v.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    if (scale == GridScale::kLog)
      v.push_back(std::exp(std::log(start) + f * (std::log(stop) - std::log(start))));
    else
      v.push_back(start + f * (stop - start));
  }
  if (points >= 2) {
    v.front() = start;
    v.back() = stop;
  }
  return v;
}

std::string to_string(SweepVariable v) {
  for (const auto& [name, var] : variable_table())
    if (var == v) return name;
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  return to_enum("sweep.variable", name, variable_table());
}

void apply(Scenario& s, SweepVariable v, std::optional<double> value) {
  if (!value && v != SweepVariable::kTheta) throw ConfigError("apply: 'auto' is only valid for theta");
  switch (v) {
    case SweepVariable::kOmegaK: s.omega_k_over_kappa = *value; break;
    case SweepVariable::kTheta: s.theta = value; break;
    case SweepVariable::kEta: s.eta = *value; break;
    case SweepVariable::kKappa: s.kappa = kTwoPi * *value; break;
    case SweepVariable::kGamma: s.gamma = kTwoPi * *value; break;
    case SweepVariable::kPower: s.power = *value; break;
    case SweepVariable::kG: s.g_freq = kTwoPi * *value; break;
    case SweepVariable::kTemperature: s.temperature = *value; break;
    case SweepVariable::kDelta0: s.delta0_over_kappa = *value; break;
  }
}

void validate(const RunConfig& c) {
  try {
    c.scenario.params().validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const Scenario& s = c.scenario;
  if (!(s.kappa_in_fraction > 0.0 && s.kappa_in_fraction <= 1.0))
    throw ConfigError("config: kappa_in_fraction must lie in (0, 1]");
  if (!(s.window_times_kappa > 0.0)) throw ConfigError("config: window_times_kappa must be > 0");
  if (!(s.eta > 0.0 && s.eta <= 1.0)) throw ConfigError("config: eta must lie in (0, 1]");
  if (!(c.options.diffusion.rel_tol > 0.0)) throw ConfigError("config: diffusion_rel_tol must be > 0");
  if (!(c.options.fd.h_rel > 0.0) || !(c.options.fd.h_floor > 0.0))
    throw ConfigError("config: finite-difference steps must be > 0");
  if (c.has_sweep) {
    const GridSpec& g = c.sweep.grid;
    if (g.points < 2) throw ConfigError("config: sweep grids need at least 2 points");
    if (g.scale == GridScale::kLog && !(g.start > 0.0 && g.stop > 0.0))
      throw ConfigError("config: log grids need positive start and stop");
    if (c.sweep.series_variable && *c.sweep.series_variable == c.sweep.variable)
      throw ConfigError("config: series_variable must differ from the swept variable");
  }
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_tree(tree);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

}  // namespace omfisher
