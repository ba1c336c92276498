// Acceptance suite: one PASS/FAIL line per criterion.
//
// Criteria listed in kKnownRed are reproducible model-level disagreements
// with claims of the source figures (see README, "Known deviations"). They
// are evaluated exactly as stated and reported FAIL; the process exit
// status is nonzero only when some other criterion fails, or when a known
// red unexpectedly turns green (so the list cannot go stale).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"
#include "omfisher/noise_kernels.hpp"
#include "omfisher/oracle.hpp"
#include "omfisher/pipeline.hpp"
#include "omfisher/sweep.hpp"

using namespace omfisher;
using constants::kHbar;
using constants::kPi;

namespace {

const std::set<int> kKnownRed{5, 7, 9, 11, 12};

struct Outcome {
  int id;
  bool pass;
};
std::vector<Outcome> outcomes;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  outcomes.push_back({id, pass});
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " | " << detail << "\n";
}

void info(int id, const std::string& detail) { std::cout << "      criterion " << id << " info: " << detail << "\n"; }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SystemParams random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SystemParams p = SystemParams::rossi();
  p.kappa_in *= std::pow(10.0, 0.5 * u(rng));
  p.kappa_loss = p.kappa_in;
  p.gamma *= std::pow(10.0, u(rng));
  p.temperature *= std::pow(10.0, u(rng));
  p.power *= std::pow(10.0, u(rng));
  p.g_freq *= std::pow(10.0, 0.5 * u(rng));
  p.delta0 = p.kappa() * (-0.5 - 4.0 * (u(rng) + 1.0));
  return p;
}

std::function<Eigen::Matrix2d(double)> family(const SystemParams& p, const MeasurementSettings& m,
                                              const ModelOptions& opt) {
  return [p, m, opt](double g) {
    SystemParams q = p;
    q.g_freq = g;
    return output_sigma(q, m, opt);
  };
}

void criterion1() {
  const ModelOptions opt;
  double worst = 0.0, slowest = 0.0;
  std::vector<SystemParams> pts{SystemParams::rossi()};
  std::mt19937_64 rng(1);
  while (pts.size() < 51) {
    const SystemParams p = random_point(rng);
    try {
      if (is_stable(drift_matrix(p, steady_state(p)))) pts.push_back(p);
    } catch (const AmbiguityError&) {
    }
  }
  for (const SystemParams& p : pts) {
    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult r = evaluate(p, {}, opt);
    slowest = std::max(slowest, seconds_since(t0));
    worst = std::max(worst, r.sigma.residual);
  }
  report(1, "Lyapunov residual <= 1e-10, < 50 ms/point (reference + 50 random stable points)",
         worst <= 1e-10 && slowest < 0.05, "max residual " + sci(worst) + ", slowest point " + sci(slowest) + " s");
}

void criterion2() {
  std::vector<SystemParams> pts(5, SystemParams::rossi());
  pts[1].temperature = 0.5;
  pts[2].gamma *= 20.0;
  pts[3].delta0 = -5.0 * pts[3].kappa();
  pts[4].power *= 4.0;
  pts[4].g_freq *= 2.0;
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const SystemParams& p : pts) {
    const PipelineResult r = evaluate(p, {});
    const oracle::TransientResult t = oracle::transient_covariance(p, r.drift);
    worst = std::max(worst, oracle::covariance_distance(r.sigma.scaled, t.sigma));
  }
  const double elapsed = seconds_since(t0);
  report(2, "stationary covariance vs long-time integration <= 1e-6 at 5 points, < 10 s",
         worst <= 1e-6 && elapsed < 10.0, "max distance " + sci(worst) + ", " + sci(elapsed) + " s");
}

void criterion3() {
  double worst = 0.0;
  int n = 0;
  for (double t : {0.1, 11.0, 300.0}) {
    BathSpec b = BathSpec::from(SystemParams::rossi());
    b.temperature = t;
    for (int i = 0; i <= 16; ++i) {
      const double x = std::pow(10.0, -2.0 + 4.0 * i / 16.0);
      const double tau = x / b.cutoff;
      const KernelValue c = kernel_dr(b, tau);
      worst = std::max({worst, rel(kernel_dr_numeric(b, tau).d_r, c.d_r), rel(kernel_di_numeric(b, tau).d_i, c.d_i)});
      ++n;
    }
  }
  report(3, "kernel closed forms vs quadrature <= 1e-6 over tau*cutoff in [0.01, 100], T in {0.1, 11, 300} K",
         worst <= 1e-6, "max relative error " + sci(worst) + " over " + std::to_string(n) + " (tau, T) pairs");
}

void criterion4() {
  const PipelineResult r = evaluate(SystemParams::rossi(), {});
  double worst = 0.0;
  for (double kt : {0.1, 0.5, 1.0, 3.0, 10.0})
    for (double x : {0.0, 1.0, kPi, 7.0, 4 * kPi}) {
      MeasurementSpec spec = r.spec;
      spec.window = kt / spec.kappa_meas;
      spec.omega_k = x / spec.window;
      const Eigen::Matrix2d c = output_covariance(r.sigma, spec).sigma;
      const Eigen::Matrix2d n = output_covariance_numeric(r.sigma, spec).sigma;
      worst = std::max(worst, (c - n).cwiseAbs().maxCoeff() / c.cwiseAbs().maxCoeff());
    }
  MeasurementSpec spec = r.spec;
  spec.omega_k = 0.0;
  const Eigen::Matrix2d expect = spec.kappa_meas * spec.window * r.sigma.optical() + Eigen::Matrix2d::Identity();
  const double reduction =
      (output_covariance(r.sigma, spec).sigma - expect).cwiseAbs().maxCoeff() / expect.cwiseAbs().maxCoeff();
  const double eps = std::numeric_limits<double>::epsilon();
  report(4, "output filter closed form vs window double integral <= 1e-8 (25 points); omega_k=0 reduction exact",
         worst <= 1e-8 && reduction <= 2 * eps,
         "max relative error " + sci(worst) + ", reduction error " + sci(reduction));

  MeasurementSpec printed = r.spec;
  printed.vacuum = VacuumTerm::kPrinted;
  printed.omega_k = 2.5 / printed.window;
  MeasurementSpec integrated = printed;
  integrated.vacuum = VacuumTerm::kIntegrated;
  const Eigen::Matrix2d a = output_covariance(r.sigma, printed).sigma;
  const Eigen::Matrix2d b = output_covariance_numeric(r.sigma, integrated).sigma;
  info(4, "printed vacuum term sinc(2x) vs window integral at x=2.5: " + sci((a - b).cwiseAbs().maxCoeff()) +
              " absolute (the integral gives the identity)");
}

Eigen::Matrix2d squeezed_thermal(double nu, double r, double phi) {
  Eigen::Matrix2d rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  const Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(2 * r), std::exp(-2 * r)).asDiagonal();
  return nu * rot * sq * rot.transpose();
}

void criterion5() {
  struct Case {
    std::string name;
    std::function<Eigen::Matrix2d(double)> sigma;
    double g, h;
  };
  const SystemParams p = SystemParams::rossi();
  std::vector<Case> cases{
      {"thermal", [](double g) { return squeezed_thermal(0.8 + 0.3 * g, 0.0, 0.0); }, 1.0, 1e-3},
      {"squeezed thermal", [](double g) { return squeezed_thermal(0.9 + 0.2 * g, 0.3 + 0.1 * g, 0.4); }, 1.0, 1e-3},
      {"reference output", family(p, {}, {}), p.g_freq, 1e-3 * p.g_freq},
  };
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, worst_exact = 0.0, worst_trunc = 0.0;
  std::string detail;
  for (const Case& c : cases) {
    const oracle::FockQfi f = oracle::qfi_fock_family(c.sigma, c.g, c.h);
    const Eigen::Matrix2d s = c.sigma(c.g);
    const Eigen::Matrix2d ds = (c.sigma(c.g + c.h) - c.sigma(c.g - c.h)) / (2 * c.h);
    const double e = rel(qfi_gaussian(s, ds), f.value);
    worst = std::max(worst, e);
    worst_exact = std::max(worst_exact, rel(qfi_gaussian_exact(s, ds), f.value));
    worst_trunc = std::max(worst_trunc, f.relative_change);
    detail += c.name + " " + sci(e) + "; ";
  }
  const double elapsed = seconds_since(t0);
  report(5, "QFI closed form vs Fock oracle <= 1e-3 (3 families), truncation-converged, < 30 s",
         worst <= 1e-3 && worst_trunc <= 1e-4 && elapsed < 30.0,
         detail + "truncation change " + sci(worst_trunc) + ", " + sci(elapsed) + " s");
  info(5, "exact Gaussian QFI vs Fock oracle: max relative error " + sci(worst_exact));
}

void criterion6() {
  const SystemParams p = SystemParams::rossi();
  const ModelOptions opt;
  const MeasurementSettings m;
  const auto fam = family(p, m, opt);
  const Eigen::Matrix2d s = output_sigma(p, m, opt);
  const Eigen::Matrix2d ds = dsigma_out_dg(p, m, opt, opt.derivative);
  double worst = 0.0;
  for (double theta : {0.1, 0.7, 1.3, 2.0, 2.9})
    for (double eta : {1.0, 0.6})
      worst = std::max(worst, rel(cfi_bhd(s, ds, theta, eta),
                                  oracle::cfi_numeric_homodyne(fam, p.g_freq, theta, eta, 1e-3 * p.g_freq)));
  const double th = theta_max(s, ds).theta;
  const double num = oracle::cfi_numeric_homodyne(fam, p.g_freq, th, 1.0, 1e-3 * p.g_freq);
  const double bhd = rel(cfi_bhd(s, ds, th, 1.0), num);
  const double ideal = cfi_ideal(s, ds, th) / num;
  const bool adjudicated = bhd <= 1e-6 && std::abs(ideal - 2.0) <= 1e-3;
  report(6, "homodyne CFI vs numeric Fisher information <= 1e-6 (10 points); factor-2 adjudication executed",
         worst <= 1e-6 && adjudicated,
         "max relative error " + sci(worst) + "; adjudication: eta->1 homodyne formula error " + sci(bhd) +
             ", ideal-detector formula / numeric = " + sci(ideal) + " -> bhd_limit selected");
}

void criterion7() {
  std::vector<std::pair<SystemParams, MeasurementSettings>> pts;
  pts.emplace_back(SystemParams::rossi(), MeasurementSettings{});
  SystemParams p = SystemParams::rossi();
  p.delta0 = -5.0 * p.kappa();
  pts.emplace_back(p, MeasurementSettings{});
  MeasurementSettings m;
  m.omega_k = SystemParams::rossi().kappa();
  pts.emplace_back(SystemParams::rossi(), m);
  p = SystemParams::rossi();
  p.temperature = 1.0;
  pts.emplace_back(p, MeasurementSettings{});

  double worst = -1.0, worst_exact = -1.0;
  for (const auto& [sp, ms] : pts) {
    const PointResult r = evaluate_point(sp, ms);
    const Eigen::Matrix2d s = r.base.output.sigma;
    const Eigen::Matrix2d ds = dsigma_out_dg(sp, ms, {}, DerivativeMethod::kFiniteDifference);
    for (int i = 0; i < 72; ++i)
      for (double eta : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double c = cfi_bhd(s, ds, kPi * i / 72.0, eta);
        worst = std::max(worst, c / r.fisher->qfi - 1.0);
        worst_exact = std::max(worst_exact, c / r.fisher->qfi_exact - 1.0);
      }
  }
  report(7, "CFI <= QFI (1 + 1e-9) on a 72x5 (theta, eta) grid at 4 points", worst <= 1e-9,
         "max CFI/QFI - 1 = " + sci(worst));
  info(7, "against the exact Gaussian QFI: max CFI/QFI - 1 = " + sci(worst_exact));
}

RunConfig reference_config() {
  RunConfig c;
  c.scenario = Scenario::rossi();
  return c;
}

void criterion8() {
  const RunConfig c = reference_config();
  const SweepTable t = run_panels(c, preset_panels("fig1", c.scenario, c.options), "fig1");
  std::size_t best = 0, nearest = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].fisher && t.rows[i].fisher->qfi > t.rows[best].fisher->qfi) best = i;
    if (std::abs(t.rows[i].value) < std::abs(t.rows[nearest].value)) nearest = i;
  }
  report(8, "QFI argmax over omega_k in [-3, 3] kappa (121 points) is the point nearest 0", best == nearest,
         "argmax at omega_k/kappa = " + sci(t.rows[best].value) + ", " + std::to_string(t.rows.size()) + " rows");
}

void criterion9() {
  const RunConfig c = reference_config();
  const SweepTable t = run_panels(c, preset_panels("fig4", c.scenario, c.options), "fig4");
  double lo = 1e300, hi = -1e300, lo_x = 1e300, hi_x = -1e300;
  std::string where_lo, where_hi;
  int used = 0;
  for (const SweepRow& r : t.rows) {
    // At g = 0 the state does not depend on g to first order; no ratio exists.
    if (!r.fisher || (r.variable == "g" && r.value == 0.0)) continue;
    ++used;
    const double s = r.fisher->saturation_ratio;
    if (s < lo) {
      lo = s;
      where_lo = r.panel + " " + r.variable + "=" + sci(r.value);
    }
    if (s > hi) {
      hi = s;
      where_hi = r.panel + " " + r.variable + "=" + sci(r.value);
    }
    lo_x = std::min(lo_x, r.fisher->saturation_ratio_exact);
    hi_x = std::max(hi_x, r.fisher->saturation_ratio_exact);
  }
  // bhd_limit (selected by the adjudication) predicts a ratio of 1.
  const bool pass = lo >= 0.99 && hi <= 1.01 && hi <= 1.0;
  report(9, "eta=1 saturation ratio within 1% of 1 and <= 1 across the fig4 grids", pass,
         "ratio in [" + sci(lo) + " (" + where_lo + "), " + sci(hi) + " (" + where_hi + ")] over " +
             std::to_string(used) + " rows");
  info(9, "against the exact Gaussian QFI: ratio in [" + sci(lo_x) + ", " + sci(hi_x) + "]");
}

void criterion10() {
  SystemParams p = SystemParams::rossi();
  p.delta0 = -20.0 * p.kappa();
  const PointResult r = evaluate_point(p, {});
  const double t = std::fmod(r.fisher->theta_max, kPi);
  const double dist = std::min(t, kPi - t);
  report(10, "theta_max at delta0 = -20 kappa, omega_k = 0 within 0.05 pi of pi", dist <= 0.05 * kPi,
         "theta_max = " + sci(r.fisher->theta_max / kPi) + " pi, distance " + sci(dist / kPi) + " pi");
}

bool strictly(const std::vector<const SweepRow*>& rows, int sign) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(sign * (rows[i]->fisher->cfi - rows[i - 1]->fisher->cfi) > 0.0)) return false;
  return true;
}

void criterion11() {
  const RunConfig c = reference_config();
  const SweepTable t = run_panels(c, preset_panels("fig4", c.scenario, c.options), "fig4");
  auto panel = [&](const std::string& name) {
    std::vector<const SweepRow*> out;
    for (const SweepRow& r : t.rows)
      if (r.panel == name && r.fisher) out.push_back(&r);
    return out;
  };
  const auto k = panel("fig4a"), g = panel("fig4b"), pw = panel("fig4c"), gg = panel("fig4d");
  const bool dk = strictly(k, -1), dg = strictly(g, -1), ip = strictly(pw, +1), ig = strictly(gg, +1);
  std::size_t argmin = 0, drops = 0;
  for (std::size_t i = 0; i < gg.size(); ++i) {
    if (gg[i]->fisher->cfi < gg[argmin]->fisher->cfi) argmin = i;
    if (i && gg[i]->fisher->cfi <= gg[i - 1]->fisher->cfi) ++drops;
  }
  const bool all_stable = std::all_of(t.rows.begin(), t.rows.end(), [](const SweepRow& r) { return r.stable; });
  report(11, "CFI decreasing in kappa and gamma, increasing in P and g, g-minimum at smallest g",
         dk && dg && ip && ig && argmin == 0 && all_stable,
         std::string("kappa ") + (dk ? "ok" : "no") + ", gamma " + (dg ? "ok" : "no") + ", P " + (ip ? "ok" : "no") +
             ", g " + (ig ? "ok" : "no (" + std::to_string(drops) + " decreasing steps)") + ", g argmin " +
             (argmin == 0 ? "ok" : "no") + ", grids stable " + (all_stable ? "yes" : "no"));
}

void criterion12() {
  const RunConfig c = reference_config();
  const SweepTable t = run_panels(c, preset_panels("fig5", c.scenario, c.options), "fig5");
  const std::vector<std::string> series{"gamma=130", "gamma=1300", "gamma=13000"};
  std::vector<std::vector<double>> q(3);
  for (const SweepRow& r : t.rows)
    for (int s = 0; s < 3; ++s)
      if (r.series == series[s]) q[s].push_back(r.fisher ? r.fisher->qfi : std::nan(""));
  int rises = 0, misordered = 0;
  for (int s = 0; s < 3; ++s)
    for (std::size_t i = 1; i < q[s].size(); ++i)
      if (!(q[s][i] <= q[s][i - 1])) ++rises;
  for (std::size_t i = 0; i < q[0].size(); ++i)
    if (!(q[0][i] > q[1][i] && q[1][i] > q[2][i])) ++misordered;
  report(12, "QFI non-increasing in T on [0.01, 100] K; QFI(gamma0) > QFI(10 gamma0) > QFI(100 gamma0)",
         rises == 0 && misordered == 0,
         std::to_string(rises) + " increasing steps, " + std::to_string(misordered) + " of " +
             std::to_string(q[0].size()) + " temperatures misordered; QFI(0.01 K) " + sci(q[0].front()) +
             ", QFI(100 K) " + sci(q[0].back()));
}

// Positive real roots of c^2 A^3 - 2 d0 c A^2 + L A - eps^2, counted
// from the discriminant (all real roots are positive by Descartes' rule).
int root_count(const SystemParams& p) {
  const double c = kHbar * std::pow(coupling_to_si(p.g_freq, p.mass, p.omega_m), 2) / (p.mass * p.omega_m * p.omega_m);
  const double a3 = c * c, a2 = -2.0 * p.delta0 * c, a1 = p.delta0 * p.delta0 + 0.25 * p.kappa() * p.kappa();
  const double a0 = -2.0 * p.kappa_in * p.power / (kHbar * p.omega_laser);
  // Scale A by the linear response so the coefficients are O(1).
  const double s = -a0 / a1;
  const double b3 = a3 * s * s * s, b2 = a2 * s * s, b1 = a1 * s, b0 = a0;
  const double disc = 18 * b3 * b2 * b1 * b0 - 4 * b2 * b2 * b2 * b0 + b2 * b2 * b1 * b1 - 4 * b3 * b1 * b1 * b1 -
                      27 * b3 * b3 * b0 * b0;
  return disc > 0.0 ? 3 : 1;
}

std::vector<double> scan_window(SystemParams p) {
  std::vector<double> edges;
  auto count_at = [&](double lp) {
    p.power = std::pow(10.0, lp);
    return root_count(p);
  };
  // Near the cusp the window is ~0.005 decades wide; step 5e-4 decades.
  const double lo = -9.0, hi = 1.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double a = lo + (hi - lo) * i / n, b = lo + (hi - lo) * (i + 1) / n;
    const int ca = count_at(a);
    if (ca == count_at(b)) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      (count_at(mid) == ca ? a : b) = mid;
    }
    edges.push_back(std::pow(10.0, 0.5 * (a + b)));
  }
  return edges;
}

void criterion13() {
  const SystemParams base = SystemParams::rossi();
  const double k = base.kappa();
  double worst = 0.0;
  bool ok = true;
  std::string issues;
  for (double d : {0.9, 1.0, 1.3, 1.7, 2.0, 3.0, 4.5, 6.0, 8.0, 12.0}) {
    SystemParams p = base;
    p.delta0 = d * k;
    const BistabilityWindow w = bistability_window(p);
    const std::vector<double> e = scan_window(p);
    if (w.monostable_for_all_power || e.size() != 2) {
      ok = false;
      issues += " window missing at " + sci(d) + " kappa;";
      continue;
    }
    worst = std::max({worst, rel(*w.p_minus, e[0]), rel(*w.p_plus, e[1])});
    // The opposite detuning and detunings below sqrt(3)/2 kappa are monostable.
    for (double dd : {-d, 0.8}) {
      p.delta0 = dd * k;
      if (!bistability_window(p).monostable_for_all_power || !scan_window(p).empty()) {
        ok = false;
        issues += " spurious window at " + sci(dd) + " kappa;";
      }
    }
  }
  report(13, "P- and P+ vs cubic root-count scan <= 0.1% at 10 detunings; monostability reported otherwise",
         ok && worst <= 1e-3, "max relative error " + sci(worst) + (issues.empty() ? "" : ";" + issues));
}

void criterion14() {
  const RunConfig c = reference_config();
  auto csv = [&](const char* threads) {
    setenv("OMFISHER_THREADS", threads, 1);
    std::ostringstream os;
    write_csv(os, run_panels(c, preset_panels("fig2", c.scenario, c.options), "fig2"));
    return os.str();
  };
  const std::string a = csv("1"), b = csv("1"), d = csv("4");
  unsetenv("OMFISHER_THREADS");
  report(14, "repeated sweeps with one config are byte-identical", a == b && a == d,
         std::to_string(a.size()) + " bytes; 1 vs 1 thread " + (a == b ? "identical" : "differ") +
             ", 1 vs 4 threads " + (a == d ? "identical" : "differ"));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1,  criterion2,  criterion3,  criterion4, criterion5,
                                                    criterion6,  criterion7,  criterion8,  criterion9, criterion10,
                                                    criterion11, criterion12, criterion13, criterion14};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "aborted", false, e.what());
    }
  }

  int failed = 0, unexpected = 0;
  for (const Outcome& o : outcomes) {
    const bool known = kKnownRed.count(o.id) > 0;
    if (!o.pass) ++failed;
    if (o.pass == known) {
      ++unexpected;
      std::cout << "UNEXPECTED  criterion " << o.id << (o.pass ? " passed but is listed as a known deviation"
                                                               : " failed and is not a known deviation")
                << "\n";
    }
  }
  std::cout << outcomes.size() - failed << " passed, " << failed << " failed (known deviations:";
  for (int id : kKnownRed) std::cout << " " << id;
  std::cout << ")\n";
  return unexpected ? 1 : 0;
}
