#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace omfisher {

// Phi = -(1/2) d(sigma^-1)/dg and nu = Tr[Phi sigma].
struct SldCoefficients {
  Eigen::Matrix2d phi = Eigen::Matrix2d::Zero();
  double nu = 0.0;
};

struct QfiBreakdown {
  double value = 0.0;      // (1/2)Tr[(d(s^-1) s)^2] - (1/8) det d(s^-1)
  double long_form = 0.0;  // 3Tr[(Phi s)^2] - 2 nu Tr[Phi s] + 2 det s det Phi - det Phi / 2 + nu^2
  SldCoefficients sld;
};

SldCoefficients sld_coefficients(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma);
QfiBreakdown qfi_gaussian_breakdown(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma);
double qfi_gaussian(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma);

// Exact single-mode Gaussian QFI (vacuum variance 1/2):
// (1/2)Tr[(s^-1 s')^2]/(1 + mu^2) + 2 mu'^2/(1 - mu^4), mu = 1/(2 sqrt(det s)).
double qfi_gaussian_exact(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma);

// 2 (eta R^T s' R / (1 - eta + 2 eta R^T s R))^2.
double cfi_bhd(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double theta, double eta);

// (R^T s' R / R^T s R)^2; twice the eta -> 1 limit of cfi_bhd.
double cfi_ideal(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double theta);

struct ThetaMax {
  double theta = 0.0;   // in [0, pi)
  double lambda = 0.0;  // Rayleigh quotient R^T s' R / R^T s_eta R at theta
  double cfi = 0.0;     // cfi_bhd at theta
  bool degenerate = false;
};

// eta = 1: largest-|lambda| eigenvector of s^-1/2 s' s^-1/2.
// eta < 1: golden-section refinement of a 360-point grid of cfi_bhd.
ThetaMax theta_max(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double eta = 1.0);
ThetaMax theta_max_search(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, double eta);

struct FiniteDifferenceOptions {
  double h_rel = 1e-6;
  double h_floor = 1e-3;  // absolute, in units of g
};

// Central differences with one Richardson level; falls back to one-sided
// stencils when g - 2h < 0.
Eigen::Matrix2d dsigma_dg(const std::function<Eigen::Matrix2d(double)>& pipeline, double g,
                          const FiniteDifferenceOptions& opt = {});

enum class DerivativeMethod { kFiniteDifference, kDerivativeLyapunov };
enum class CfiConvention {
  kBhdLimit,      // cfi_bhd as is
  kPrintedIdeal,  // twice cfi_bhd; equals cfi_ideal at eta = 1
};

std::string to_string(DerivativeMethod m);
std::string to_string(CfiConvention c);

struct FisherReport {
  double qfi = 0.0;
  double qfi_exact = 0.0;
  double qfi_long_form = 0.0;
  double cfi = 0.0;        // at theta under the chosen convention
  double cfi_ideal = 0.0;  // printed ideal-detector formula at theta
  double cfi_bhd_eta1 = 0.0;
  double theta = 0.0;
  double theta_max = 0.0;
  double lambda_max = 0.0;
  double cfi_max = 0.0;
  double saturation_ratio = 0.0;        // cfi_max / qfi
  double saturation_ratio_exact = 0.0;  // cfi_max / qfi_exact
  bool degenerate = false;
  double eta = 1.0;
  DerivativeMethod derivative_method = DerivativeMethod::kFiniteDifference;
  CfiConvention convention = CfiConvention::kBhdLimit;
};

// theta empty selects theta_max.
FisherReport fisher_report(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma,
                           std::optional<double> theta, double eta,
                           CfiConvention convention = CfiConvention::kBhdLimit,
                           DerivativeMethod method = DerivativeMethod::kFiniteDifference);

}  // namespace omfisher
