#include "omfisher/special_functions.hpp"

#include <cmath>

#include "omfisher/constants.hpp"
#include "omfisher/errors.hpp"

namespace omfisher {

namespace {

using cplx = std::complex<double>;

// Bernoulli numbers B_2 .. B_20.
constexpr double kBernoulli[10] = {
    1.0 / 6.0,        -1.0 / 30.0,   1.0 / 42.0,       -1.0 / 30.0,
    5.0 / 66.0,       -691.0 / 2730.0, 7.0 / 6.0,      -3617.0 / 510.0,
    43867.0 / 798.0,  -174611.0 / 330.0};

// Psi'(z) ~ 1/z + 1/(2z^2) + sum_k B_2k / z^(2k+1), for |z| >= 10, Re z > 0.
cplx asymptotic(cplx z) {
  const cplx w = 1.0 / z;
  const cplx w2 = w * w;
  cplx sum = 0.0;
  for (int k = 9; k >= 0; --k) sum = sum * w2 + kBernoulli[k];
  return w + 0.5 * w2 + w * w2 * sum;
}

}  // namespace

std::complex<double> trigamma_complex(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("trigamma_complex: non-finite argument");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw DomainError("trigamma_complex: pole at non-positive integer");

  if (z.real() < 0.0) {
    // Reflection keeps the upward recurrence short.
    const cplx s = std::sin(constants::kPi * z);
    return constants::kPi * constants::kPi / (s * s) - trigamma_complex(1.0 - z);
  }

  cplx acc = 0.0;
  while (z.real() < 10.0) {
    acc += 1.0 / (z * z);
    z += 1.0;
  }
  return acc + asymptotic(z);
}

double x_coth_x(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
  }
  if (ax > 20.0) return ax;
  return x / std::tanh(x);
}

}  // namespace omfisher
