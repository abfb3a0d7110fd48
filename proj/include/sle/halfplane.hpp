#pragma once

#include <complex>

namespace sle {

using Complex = std::complex<double>;

/// z^2 as ((a - b)(a + b), 2ab); avoids the NaN-recovery path of operator*.
inline Complex square(Complex z) {
    const double a = z.real();
    const double b = z.imag();
    return {(a - b) * (a + b), 2.0 * a * b};
}

/// Square root on the closed upper half-plane branch: Im(result) >= 0, and
/// the nonnegative root on the positive real axis. sqrt_h(-r) = i*sqrt(r).
Complex sqrt_h(Complex w);

/// Constant-driving forward slit map g_t(z) = A + sqrt_h((z - A)^2 + 4t).
Complex slit_forward(Complex z, double level, double duration);

/// Constant-driving reverse slit map h_t(z) = A + sqrt_h((z - A)^2 - 4t).
/// Points that the reverse slit would swallow land on the upper branch.
Complex slit_reverse(Complex z, double level, double duration);

}  // namespace sle
