#include <doctest.h>

#include <cmath>

#include <Eigen/Core>

#include "omfisher/constants.hpp"
#include "omfisher/quadrature.hpp"

using namespace omfisher;

TEST_CASE("smooth integrals") {
  const auto r = quad::integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::sqrt(constants::kPi)).epsilon(1e-13));
}

TEST_CASE("oscillatory integrand with breakpoints") {
  std::vector<double> pts;
  for (int i = 0; i <= 100; ++i) pts.push_back(i * constants::kPi);
  const auto r = quad::integrate([](double x) { return std::sin(x) * std::exp(-0.01 * x); }, pts);
  const double exact = (1.0 - std::exp(-0.01 * 100 * constants::kPi)) / (1.0 + 1e-4);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("endpoint singularity is resolved adaptively") {
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("matrix-valued integrand") {
  auto f = [](double x) {
    Eigen::Matrix2d m;
    m << x, x * x, std::cos(x), 1.0;
    return m;
  };
  const auto r = quad::integrate(f, 0.0, 1.0);
  CHECK(r.value(0, 0) == doctest::Approx(0.5));
  CHECK(r.value(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(r.value(1, 0) == doctest::Approx(std::sin(1.0)));
  CHECK(r.value(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("budget exhaustion is reported, not hidden") {
  quad::Options opt;
  opt.max_panels = 3;
  opt.rel_tol = 1e-15;
  const auto r = quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.abs_error > 0.0);
}
