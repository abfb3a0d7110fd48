#include "sle/halfplane.hpp"

#include <algorithm>
#include <cmath>

#include "sle/error.hpp"

namespace sle {

namespace {

// Rescale outside [2^-500, 2^500] so hypot and the half-sum stay finite and normal.
constexpr double kHuge = 0x1p+500;
constexpr double kTiny = 0x1p-500;
constexpr int kShift = 600;

Complex shifted_square(Complex z, double level) {
    return square({z.real() - level, z.imag()});
}

}  // namespace

Complex sqrt_h(Complex w) {
    double x = w.real();
    double y = w.imag();
    if (x == 0.0 && y == 0.0) return {0.0, 0.0};

    int exponent = 0;
    const double magnitude = std::max(std::abs(x), std::abs(y));
    if (magnitude > kHuge) {
        x = std::ldexp(x, -kShift);
        y = std::ldexp(y, -kShift);
        exponent = kShift / 2;
    } else if (magnitude < kTiny) {
        x = std::ldexp(x, kShift);
        y = std::ldexp(y, kShift);
        exponent = -kShift / 2;
    }

    const double r = std::sqrt(0.5 * (std::abs(x) + std::hypot(x, y)));
    double re;
    double im;
    if (x >= 0.0) {
        re = r;
        im = y / (2.0 * r);
        if (im < 0.0) {
            re = -re;
            im = -im;
        }
    } else {
        re = y / (2.0 * r);
        im = r;
    }
    return {std::ldexp(re, exponent), std::ldexp(im, exponent)};
}

Complex slit_forward(Complex z, double level, double duration) {
    if (!(duration >= 0.0)) throw ValidationError("slit map duration must be >= 0");
    if (duration == 0.0) return z;
    return level + sqrt_h(shifted_square(z, level) + 4.0 * duration);
}

Complex slit_reverse(Complex z, double level, double duration) {
    if (!(duration >= 0.0)) throw ValidationError("slit map duration must be >= 0");
    if (duration == 0.0) return z;
    return level + sqrt_h(shifted_square(z, level) - 4.0 * duration);
}

}  // namespace sle
