#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "omfisher/config.hpp"
#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/sweep.hpp"
#include "omfisher/validate.hpp"

using namespace omfisher;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

int cmd_sweep(const std::string& config_path, const std::string& preset, const std::string& out_path,
              const std::string& format) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = parse_config_file(config_path);
  else cfg.scenario = Scenario::rossi();
  if (!out_path.empty()) cfg.output_path = out_path;
  if (format == "csv") cfg.format = OutputFormat::kCsv;
  else if (format == "json") cfg.format = OutputFormat::kJson;

  SweepTable table;
  if (!preset.empty()) {
    check_baseline(cfg.scenario, cfg.options);
    table = run_panels(cfg, preset_panels(preset, cfg.scenario, cfg.options), "preset " + preset);
  } else {
    table = run_sweep(cfg);
  }

  auto emit = [&](std::ostream& os) {
    if (cfg.format == OutputFormat::kJson) write_json(os, table);
    else write_csv(os, table);
  };
  if (cfg.output_path.empty()) {
    emit(std::cout);
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + cfg.output_path + "'");
    emit(f);
  }
  return 0;
}

int cmd_steady_state(const std::string& config_path) {
  const RunConfig cfg = parse_config_file(config_path);
  const SystemParams p = cfg.scenario.params();
  std::cout << std::setprecision(10);
  const BistabilityWindow w = bistability_window(p, cfg.options.steady);
  std::cout << "bistability:\n";
  if (w.monostable_for_all_power) {
    std::cout << "  monostable for all drive powers at this detuning\n";
  } else {
    std::cout << "  P- = " << *w.p_minus << " W\n  P+ = " << *w.p_plus << " W\n";
  }
  const SteadyState ss = steady_state(p, cfg.options.steady);
  std::cout << "steady state:\n"
            << "  |alpha|^2        = " << ss.alpha_abs2 << "\n"
            << "  alpha            = " << ss.alpha << "\n"
            << "  delta_eff/kappa  = " << ss.delta_eff / p.kappa() << "\n"
            << "  q0 [m]           = " << ss.q0 << "\n"
            << "  epsilon [rad/s]  = " << ss.epsilon << "\n"
            << "  branches         = " << ss.branch_count << "\n"
            << "  stable           = " << (ss.stable ? "true" : "false") << "\n"
            << "  residual (laser) = " << ss.residual_laser << "\n"
            << "  residual (delta) = " << ss.residual_delta << "\n";
  if (ss.roots.size() > 1) {
    std::cout << "  roots            =";
    for (double r : ss.roots) std::cout << " " << r;
    std::cout << "\n";
  }
  return 0;
}

int cmd_validate(const std::vector<std::string>& only, double scale) {
  ValidateOptions opt;
  opt.only = only;
  opt.tolerance_scale = scale;
  const ValidateReport report = run_validation(opt);
  print_report(std::cout, report);
  return report.all_pass() ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher information of a cavity optomechanical probe"};
  app.require_subcommand(1);

  std::string config, preset, out, format;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter sweep and emit a table");
  sweep->add_option("--config", config, "Config file (defaults to the reference parameter set)");
  sweep->add_option("--preset", preset, "Figure preset")->check(CLI::IsMember(preset_names()));
  sweep->add_option("--out", out, "Output path (default stdout)");
  sweep->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  std::string ss_config;
  auto* steady = app.add_subcommand("steady-state", "Print the steady state and bistability window");
  steady->add_option("--config", ss_config, "Config file")->required();

  std::vector<std::string> only;
  double scale = 1.0;
  auto* validate_cmd = app.add_subcommand("validate", "Run the oracle suite");
  validate_cmd->add_option("--only", only, "Run only these suites")->check(CLI::IsMember(validate_suites()));
  validate_cmd->add_option("--tolerance-scale", scale, "Multiply every tolerance (0 forces failure)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sweep) {
      if (config.empty() && preset.empty()) throw ConfigError("sweep needs --config or --preset");
      return cmd_sweep(config, preset, out, format);
    }
    if (*steady) return cmd_steady_state(ss_config);
    return cmd_validate(only, scale);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
