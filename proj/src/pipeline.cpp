#include "omfisher/pipeline.hpp"

#include <sstream>

#include "omfisher/errors.hpp"

namespace omfisher {

MeasurementSpec measurement_spec(const SystemParams& p, const MeasurementSettings& m,
                                 const ModelOptions& opt) {
  MeasurementSpec s;
  s.omega_k = m.omega_k;
  s.window = m.window > 0.0 ? m.window : 1.0 / p.kappa();
  s.kappa_meas = opt.kappa_meas == KappaMeasMode::kKappaIn ? p.kappa_in : p.kappa();
  s.eta = m.eta;
  s.theta = m.theta.value_or(0.0);
  s.vacuum = opt.vacuum;
  s.validate();
  return s;
}

PipelineResult evaluate(const SystemParams& p, const MeasurementSettings& m, const ModelOptions& opt) {
  PipelineResult r;
  r.spec = measurement_spec(p, m, opt);
  r.steady = steady_state(p, opt.steady);
  r.drift = drift_matrix(p, r.steady);
  r.stable = is_stable(r.drift);
  if (!r.stable) return r;
  r.diffusion = diffusion_matrix(p, r.drift, opt.diffusion);
  r.sigma = stationary_covariance(r.drift, r.diffusion);
  r.output = output_covariance(r.sigma, r.spec);
  return r;
}

Eigen::Matrix2d output_sigma(const SystemParams& p, const MeasurementSettings& m,
                             const ModelOptions& opt) {
  const PipelineResult r = evaluate(p, m, opt);
  if (!r.stable) throw PreconditionError("output_sigma: unstable parameter point");
  return r.output.sigma;
}

Eigen::Matrix4d dsigma4_dg_lyapunov(const SystemParams& p, const PipelineResult& base,
                                    const ModelOptions& opt) {
  if (!base.stable) throw PreconditionError("dsigma4_dg_lyapunov: unstable parameter point");
  const Eigen::Matrix4d da = drift_derivative(p, base.steady);
  const DiffusionMatrix dd = diffusion_derivative(p, base.drift, da, opt.diffusion);
  const Eigen::Matrix4d& s = base.sigma.scaled;
  const Eigen::Matrix4d q = da * s + s * da.transpose() + dd.scaled;
  return solve_lyapunov(base.drift.scaled, q);
}

Eigen::Matrix2d dsigma_out_dg(const SystemParams& p, const MeasurementSettings& m,
                              const ModelOptions& opt, DerivativeMethod method) {
  if (method == DerivativeMethod::kDerivativeLyapunov) {
    const PipelineResult base = evaluate(p, m, opt);
    if (base.steady.branch_count != 1)
      throw DerivativeUndefinedError("dsigma_out_dg: several steady-state branches");
    const Eigen::Matrix4d ds = dsigma4_dg_lyapunov(p, base, opt);
    return output_filter_linear(ds.block<2, 2>(2, 2), base.spec);
  }

  const int branches = steady_state(p, opt.steady).branch_count;
  auto at = [&](double g) -> Eigen::Matrix2d {
    SystemParams q = p;
    q.g_freq = g;
    try {
      const PipelineResult r = evaluate(q, m, opt);
      if (!r.stable || r.steady.branch_count != branches) {
        std::ostringstream msg;
        msg << "dsigma_out_dg: stability or branch structure changes near g = " << p.g_freq;
        throw DerivativeUndefinedError(msg.str());
      }
      return r.output.sigma;
    } catch (const AmbiguityError& e) {
      throw DerivativeUndefinedError(std::string("dsigma_out_dg: ") + e.what());
    }
  };
  return dsigma_dg(at, p.g_freq, opt.fd);
}

PointResult evaluate_point(const SystemParams& p, const MeasurementSettings& m,
                           const ModelOptions& opt) {
  PointResult out;
  out.base = evaluate(p, m, opt);
  if (!out.base.stable) return out;
  const Eigen::Matrix2d ds = dsigma_out_dg(p, m, opt, opt.derivative);
  out.fisher = fisher_report(out.base.output.sigma, ds, m.theta, m.eta, opt.convention, opt.derivative);
  return out;
}

}  // namespace omfisher
