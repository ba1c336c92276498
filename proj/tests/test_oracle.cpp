#include <doctest.h>

#include <cmath>

#include "omfisher/errors.hpp"
#include "omfisher/oracle.hpp"
#include "omfisher/pipeline.hpp"

using namespace omfisher;

namespace {

Eigen::Matrix2d squeezed(double nu, double r) {
  return nu * Eigen::Vector2d(std::exp(2 * r), std::exp(-2 * r)).asDiagonal().toDenseMatrix();
}

}  // namespace

TEST_CASE("vacuum maps to the vacuum projector") {
  const oracle::FockState f = oracle::gaussian_to_fock(0.5 * Eigen::Matrix2d::Identity(), 30);
  CHECK(std::abs(f.rho(0, 0) - 1.0) < 1e-14);
  CHECK(f.trace_deficit < 1e-14);
  CHECK((f.rho.cwiseAbs().sum() - 1.0) < 1e-13);
}

TEST_CASE("squeezed vacuum is pure") {
  const oracle::FockState f = oracle::gaussian_to_fock(squeezed(0.5, 0.5), 60);
  CHECK(std::abs((f.rho * f.rho).trace().real() - 1.0) < 1e-8);
}

TEST_CASE("thermal state has a geometric distribution") {
  const oracle::FockState f = oracle::gaussian_to_fock(1.5 * Eigen::Matrix2d::Identity(), 80);
  for (int n = 0; n < 10; ++n) CHECK(f.rho(n, n).real() == doctest::Approx(std::pow(0.5, n + 1)).epsilon(1e-12));
  CHECK(std::abs(f.rho(0, 1)) < 1e-14);
}

TEST_CASE("covariance round trip") {
  Eigen::Matrix2d s;
  s << 1.1, 0.35, 0.35, 0.7;
  const Eigen::Matrix2d back = oracle::fock_covariance(oracle::gaussian_to_fock(s));
  CHECK((back - s).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unphysical covariance is refused") {
  CHECK_THROWS_AS(oracle::gaussian_to_fock(0.3 * Eigen::Matrix2d::Identity()), UnphysicalStateError);
}

TEST_CASE("constant family carries no information") {
  const oracle::FockState f = oracle::gaussian_to_fock(squeezed(0.8, 0.2), 60);
  CHECK(oracle::qfi_fock(f, f, 1e-3) == doctest::Approx(0.0));
}

TEST_CASE("thermal family: oracle reproduces the exact Gaussian value") {
  auto fam = [](double g) { return Eigen::Matrix2d((0.8 + 0.3 * g) * Eigen::Matrix2d::Identity()); };
  const oracle::FockQfi q = oracle::qfi_fock_family(fam, 1.0, 1e-3);
  const double nu = 1.1, dnu = 0.3;
  CHECK(q.value == doctest::Approx(dnu * dnu / (nu * nu - 0.25)).epsilon(1e-6));
  CHECK(q.relative_change <= 1e-4);
}

TEST_CASE("numeric Fisher information of textbook families") {
  const oracle::PdfAt flat = [](double) { return [](double k) { return std::exp(-k * k / 2) / std::sqrt(2 * M_PI); }; };
  CHECK(oracle::cfi_numeric(flat, 0.0, 1e-3, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

  const oracle::PdfAt scaled = [](double g) {
    const double v = std::exp(g);
    return [v](double k) { return std::exp(-k * k / (2 * v)) / std::sqrt(2 * M_PI * v); };
  };
  CHECK(oracle::cfi_numeric(scaled, 0.3, 1e-3, 0.0, std::exp(0.15)) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("numeric homodyne information is continuous at eta -> 1") {
  const SystemParams p = SystemParams::rossi();
  auto fam = [&](double g) {
    SystemParams q = p;
    q.g_freq = g;
    return output_sigma(q, {});
  };
  const double a = oracle::cfi_numeric_homodyne(fam, p.g_freq, 0.3, 1.0, 1e-3 * p.g_freq);
  const double b = oracle::cfi_numeric_homodyne(fam, p.g_freq, 0.3, 0.999, 1e-3 * p.g_freq);
  CHECK(std::abs(a - b) <= 0.01 * a);
}

TEST_CASE("transient integration reaches the Lyapunov solution") {
  const SystemParams p = SystemParams::rossi();
  const PipelineResult r = evaluate(p, {});
  const oracle::TransientResult t = oracle::transient_covariance(p, r.drift);
  CHECK(oracle::covariance_distance(t.sigma, r.sigma.scaled) <= 1e-6);
  CHECK((t.diffusion - r.diffusion.scaled).cwiseAbs().maxCoeff() <= 1e-6 * r.diffusion.scaled.cwiseAbs().maxCoeff());
}
