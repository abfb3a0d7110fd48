#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace sle::test {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Deterministic generator for property tests.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    /// 10^e with e uniform in [lo, hi], random sign.
    double magnitude(double lo, double hi) {
        const double v = std::pow(10.0, uniform(lo, hi));
        return uniform(0.0, 1.0) < 0.5 ? -v : v;
    }
    std::complex<double> upper(double re, double im_lo, double im_hi) {
        return {uniform(-re, re), uniform(im_lo, im_hi)};
    }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
};

inline Moments moments(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    Moments m;
    m.mean = s / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / (n - 1.0);
    m.stderr_mean = std::sqrt(m.variance / n);
    return m;
}

}  // namespace sle::test
