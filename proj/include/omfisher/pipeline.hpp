#pragma once

// End-to-end evaluation: steady state -> drift -> diffusion -> Lyapunov ->
// filtered output -> Fisher quantities.

#include <optional>

#include "omfisher/dynamics.hpp"
#include "omfisher/fisher.hpp"
#include "omfisher/output_field.hpp"
#include "omfisher/params.hpp"

namespace omfisher {

enum class KappaMeasMode { kKappaIn, kKappaTotal };

struct ModelOptions {
  SteadyStateOptions steady;
  KappaMeasMode kappa_meas = KappaMeasMode::kKappaIn;
  VacuumTerm vacuum = VacuumTerm::kIntegrated;
  DiffusionOptions diffusion;
  DerivativeMethod derivative = DerivativeMethod::kFiniteDifference;
  FiniteDifferenceOptions fd;
  CfiConvention convention = CfiConvention::kBhdLimit;
};

struct MeasurementSettings {
  double omega_k = 0.0;
  double window = 0.0;  // <= 0 selects 1/kappa
  double eta = 1.0;
  std::optional<double> theta;  // empty selects theta_max
};

MeasurementSpec measurement_spec(const SystemParams& p, const MeasurementSettings& m,
                                 const ModelOptions& opt);

struct PipelineResult {
  SteadyState steady;
  DriftMatrix drift;
  bool stable = false;
  DiffusionMatrix diffusion;
  CovarianceMatrix4 sigma;
  MeasurementSpec spec;
  OutputCovariance2 output;
};

// Unstable points return stable = false with the later stages left empty.
PipelineResult evaluate(const SystemParams& p, const MeasurementSettings& m,
                        const ModelOptions& opt = {});

// sigma_out only; throws PreconditionError at unstable points.
Eigen::Matrix2d output_sigma(const SystemParams& p, const MeasurementSettings& m,
                             const ModelOptions& opt = {});

// d sigma_out / d g_freq. Branch changes or instability inside the
// stencil raise DerivativeUndefinedError.
Eigen::Matrix2d dsigma_out_dg(const SystemParams& p, const MeasurementSettings& m,
                              const ModelOptions& opt, DerivativeMethod method);

// d sigma (4x4, scaled units) / d g_freq through the derivative Lyapunov equation.
Eigen::Matrix4d dsigma4_dg_lyapunov(const SystemParams& p, const PipelineResult& base,
                                    const ModelOptions& opt);

struct PointResult {
  PipelineResult base;
  std::optional<FisherReport> fisher;  // empty when unstable
};

PointResult evaluate_point(const SystemParams& p, const MeasurementSettings& m,
                           const ModelOptions& opt = {});

}  // namespace omfisher
