#pragma once

#include <complex>

namespace omfisher {

// Complex trigamma, Psi'(z) = sum_{n>=0} 1/(z+n)^2.
// Throws DomainError at the poles z = 0, -1, -2, ...
std::complex<double> trigamma_complex(std::complex<double> z);

// x * coth(x), finite at x = 0.
double x_coth_x(double x);

}  // namespace omfisher
