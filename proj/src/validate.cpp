#include "omfisher/validate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/noise_kernels.hpp"
#include "omfisher/oracle.hpp"
#include "omfisher/pipeline.hpp"

namespace omfisher {

using constants::kPi;

namespace {

std::string sci(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << x;
  return os.str();
}

class Recorder {
 public:
  Recorder(ValidateReport& r, std::string suite, double scale) : report_(r), suite_(std::move(suite)), scale_(scale) {}

  void check(const std::string& name, double measured, double tol, std::string detail = "") {
    const double t = tol * scale_;
    report_.checks.push_back({suite_, name, measured, t, std::isfinite(measured) && measured <= t && t > 0.0, false,
                              std::move(detail)});
  }
  void info(const std::string& name, double measured, std::string detail) {
    report_.checks.push_back({suite_, name, measured, 0.0, true, true, std::move(detail)});
  }
  void error(const std::string& name, const std::exception& e) {
    report_.checks.push_back({suite_, name, std::nan(""), 0.0, false, false, std::string("error: ") + e.what()});
  }

 private:
  ValidateReport& report_;
  std::string suite_;
  double scale_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void suite_kernels(Recorder& rec) {
  const SystemParams p = SystemParams::rossi();
  double worst = 0.0;
  std::string where;
  for (double t : {0.1, 11.0, 300.0}) {
    BathSpec b = BathSpec::from(p);
    b.temperature = t;
    for (double x : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const double tau = x / b.cutoff;
      const KernelValue c = kernel_dr(b, tau);
      const KernelValue nr = kernel_dr_numeric(b, tau);
      const KernelValue ni = kernel_di_numeric(b, tau);
      for (double e : {rel(nr.d_r, c.d_r), rel(ni.d_i, c.d_i)})
        if (e > worst) {
          worst = e;
          where = "T=" + sci(t) + " K, tau*cutoff=" + sci(x);
        }
    }
  }
  rec.check("closed form vs quadrature (D_R, D_I)", worst, 1e-6, "worst at " + where);
}

void suite_lyapunov(Recorder& rec) {
  const ModelOptions opt;
  const PipelineResult r = evaluate(SystemParams::rossi(), {}, opt);
  rec.check("residual at reference point", r.sigma.residual, 1e-10);

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int done = 0;
  for (int attempt = 0; done < 10 && attempt < 1000; ++attempt) {
    SystemParams p = SystemParams::rossi();
    p.kappa_in *= std::pow(10.0, 0.5 * u(rng));
    p.kappa_loss = p.kappa_in;
    p.gamma *= std::pow(10.0, u(rng));
    p.temperature *= std::pow(10.0, u(rng));
    p.power *= std::pow(10.0, u(rng));
    p.delta0 = p.kappa() * (-0.5 - 4.0 * (u(rng) + 1.0));
    try {
      const PipelineResult q = evaluate(p, {}, opt);
      if (!q.stable) continue;
      worst = std::max(worst, q.sigma.residual);
      ++done;
    } catch (const AmbiguityError&) {
    }
  }
  rec.check("residual at 10 random stable points", worst, 1e-10, std::to_string(done) + " points");
}

void suite_transient(Recorder& rec) {
  const SystemParams p = SystemParams::rossi();
  const PipelineResult r = evaluate(p, {});
  const oracle::TransientResult t = oracle::transient_covariance(p, r.drift);
  rec.check("stationary vs long-time integration", oracle::covariance_distance(r.sigma.scaled, t.sigma), 1e-6,
            "t1=" + sci(t.t1) + " s, " + std::to_string(t.steps) + " steps");
}

void suite_output(Recorder& rec) {
  const SystemParams p = SystemParams::rossi();
  const ModelOptions opt;
  const PipelineResult r = evaluate(p, {}, opt);
  double worst = 0.0;
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    MeasurementSpec spec = r.spec;
    spec.omega_k = x / spec.window;
    const OutputCovariance2 c = output_covariance(r.sigma, spec);
    const OutputCovariance2 n = output_covariance_numeric(r.sigma, spec);
    worst = std::max(worst, (c.sigma - n.sigma).cwiseAbs().maxCoeff() / c.sigma.cwiseAbs().maxCoeff());
  }
  rec.check("closed form vs window double integral", worst, 1e-8);

  MeasurementSpec spec = r.spec;
  spec.omega_k = 0.0;
  const Eigen::Matrix2d expect =
      spec.kappa_meas * spec.window * r.sigma.optical() + Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d got = output_covariance(r.sigma, spec).sigma;
  rec.check("omega_k = 0 reduction", (got - expect).cwiseAbs().maxCoeff() / expect.cwiseAbs().maxCoeff(), 1e-15);
}

Eigen::Matrix2d squeezed_thermal(double nu, double r, double phi) {
  Eigen::Matrix2d rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  const Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(2 * r), std::exp(-2 * r)).asDiagonal();
  return nu * rot * sq * rot.transpose();
}

void suite_qfi(Recorder& rec) {
  struct Family {
    std::string name;
    std::function<Eigen::Matrix2d(double)> sigma;
    double g, h;
  };
  const SystemParams p = SystemParams::rossi();
  const MeasurementSettings m;
  const ModelOptions opt;
  std::vector<Family> fams{
      {"thermal", [](double g) { return squeezed_thermal(0.8 + 0.3 * g, 0.0, 0.0); }, 1.0, 1e-3},
      {"squeezed thermal", [](double g) { return squeezed_thermal(0.9 + 0.2 * g, 0.3 + 0.1 * g, 0.4); }, 1.0,
       1e-3},
      {"reference output state",
       [&](double g) {
         SystemParams q = p;
         q.g_freq = g;
         return output_sigma(q, m, opt);
       },
       p.g_freq, 1e-3 * p.g_freq},
  };
  for (const Family& f : fams) {
    try {
      const oracle::FockQfi fq = oracle::qfi_fock_family(f.sigma, f.g, f.h);
      const Eigen::Matrix2d s = f.sigma(f.g);
      const Eigen::Matrix2d ds = (f.sigma(f.g + f.h) - f.sigma(f.g - f.h)) / (2 * f.h);
      const double printed = qfi_gaussian(s, ds);
      const double exact = qfi_gaussian_exact(s, ds);
      rec.check("closed form vs Fock oracle, " + f.name, rel(printed, fq.value), 1e-3,
                "formula " + sci(printed) + ", oracle " + sci(fq.value) + ", n_max " + std::to_string(fq.n_max));
      rec.info("exact Gaussian QFI vs Fock oracle, " + f.name, rel(exact, fq.value),
               "exact " + sci(exact) + "; truncation change " + sci(fq.relative_change));
    } catch (const Error& e) {
      rec.error("Fock oracle, " + f.name, e);
    }
  }
}

std::function<Eigen::Matrix2d(double)> reference_family(const ModelOptions& opt, const MeasurementSettings& m) {
  return [opt, m](double g) {
    SystemParams q = SystemParams::rossi();
    q.g_freq = g;
    return output_sigma(q, m, opt);
  };
}

void suite_cfi(Recorder& rec) {
  const SystemParams p = SystemParams::rossi();
  const ModelOptions opt;
  const MeasurementSettings m;
  const auto fam = reference_family(opt, m);
  const Eigen::Matrix2d s = output_sigma(p, m, opt);
  const Eigen::Matrix2d ds = dsigma_out_dg(p, m, opt, opt.derivative);
  double worst = 0.0;
  for (double theta : {0.1, 0.7, 1.3, 2.0, 2.9})
    for (double eta : {1.0, 0.6}) {
      const double num = oracle::cfi_numeric_homodyne(fam, p.g_freq, theta, eta, 1e-3 * p.g_freq);
      worst = std::max(worst, rel(cfi_bhd(s, ds, theta, eta), num));
    }
  rec.check("homodyne formula vs numeric Fisher information (10 points)", worst, 1e-6);
}

void suite_factor2(Recorder& rec) {
  const SystemParams p = SystemParams::rossi();
  const ModelOptions opt;
  const MeasurementSettings m;
  const auto fam = reference_family(opt, m);
  const Eigen::Matrix2d s = output_sigma(p, m, opt);
  const Eigen::Matrix2d ds = dsigma_out_dg(p, m, opt, opt.derivative);
  const double theta = theta_max(s, ds).theta;
  const double num = oracle::cfi_numeric_homodyne(fam, p.g_freq, theta, 1.0, 1e-3 * p.g_freq);
  const double bhd = cfi_bhd(s, ds, theta, 1.0);
  const double ideal = cfi_ideal(s, ds, theta);
  const bool bhd_wins = rel(bhd, num) < rel(ideal, num);
  rec.check("eta -> 1 limit of the homodyne formula vs numeric", rel(bhd, num), 1e-6);
  rec.info("ideal-detector formula / numeric", ideal / num,
           std::string("adjudication: ") + (bhd_wins ? "bhd_limit" : "printed_ideal") +
               " normalisation matches the outcome density");
}

}  // namespace

bool ValidateReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass || c.informational; });
}

std::vector<std::string> validate_suites() {
  return {"kernels", "lyapunov", "transient", "output", "qfi", "cfi", "factor2"};
}

ValidateReport run_validation(const ValidateOptions& opt) {
  const auto all = validate_suites();
  for (const auto& s : opt.only)
    if (std::find(all.begin(), all.end(), s) == all.end()) throw ConfigError("validate: unknown suite '" + s + "'");
  if (!(opt.tolerance_scale >= 0.0)) throw ConfigError("validate: tolerance scale must be >= 0");

  ValidateReport report;
  for (const auto& name : all) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), name) == opt.only.end()) continue;
    Recorder rec(report, name, opt.tolerance_scale);
    try {
      if (name == "kernels") suite_kernels(rec);
      else if (name == "lyapunov") suite_lyapunov(rec);
      else if (name == "transient") suite_transient(rec);
      else if (name == "output") suite_output(rec);
      else if (name == "qfi") suite_qfi(rec);
      else if (name == "cfi") suite_cfi(rec);
      else if (name == "factor2") suite_factor2(rec);
    } catch (const Error& e) {
      rec.error("suite aborted", e);
    }
  }
  return report;
}

void print_report(std::ostream& out, const ValidateReport& report) {
  int failed = 0;
  for (const CheckResult& c : report.checks) {
    if (!c.pass && !c.informational) ++failed;
    out << (c.informational ? "INFO" : c.pass ? "PASS" : "FAIL") << "  [" << c.suite << "] " << c.name;
    if (!std::isnan(c.measured)) {
      out << ": " << sci(c.measured);
      if (!c.informational) out << " (tol " << sci(c.tolerance) << ")";
    }
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
  }
  out << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << "\n";
}

}  // namespace omfisher
