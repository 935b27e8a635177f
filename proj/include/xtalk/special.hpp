#pragma once

#include <complex>

namespace xtalk {

/// Modified Bessel function of the second kind, order zero.
/// Ascending series for x ≤ 2, Steed/Temme continued fraction on (2, 25),
/// asymptotic expansion beyond. Throws DomainError for x ≤ 0.
double k0(double x);

/// e^x K0(x), free of underflow for large x.
double k0_scaled(double x);

/// Modified Bessel function of the first kind, order zero (series; moderate x).
double i0(double x);

/// Bessel functions of the first and second kind, order zero.
double j0(double x);
double y0(double x);

/// H0^(1)(x) = J0(x) + i Y0(x), x > 0.
std::complex<double> hankel1_0(double x);

} // namespace xtalk
