#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sle/halfplane.hpp"

namespace sle {

/// E[Z_t^2] = -y^2 + (kappa - 4) t for the reverse flow started at iy.
double second_moment_closed_form(double kappa, double y0, double t);

/// E[Z_t^4] = y^4 + (6 kappa - 8)(-y^2 t + (kappa - 4) t^2 / 2).
double fourth_moment_closed_form(double kappa, double y0, double t);

/// Gauss-Hermite rule for E[f(X)], X ~ N(0, 1) (probabilists' weights).
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;

    static GaussHermite make(std::size_t n);

    template <class F>
    auto expect(F&& f) const {
        auto acc = f(nodes[0]) * weights[0];
        for (std::size_t i = 1; i < nodes.size(); ++i) acc += f(nodes[i]) * weights[i];
        return acc;
    }
};

struct MomentRow {
    double t = 0.0;
    double expected_m2 = 0.0;
    double expected_m4 = 0.0;
    Complex m2;
    Complex m4;
    double deviation_m2 = 0.0;
    double deviation_m4 = 0.0;
    /// Ensemble standard errors of Re and Im (zero for quadrature rows).
    Complex stderr_m2;
    Complex stderr_m4;
};

struct MomentReport {
    double kappa = 0.0;
    double y0 = 0.0;
    double horizon = 1.0;
    std::size_t steps = 0;
    std::size_t paths = 0;  ///< 0 for the quadrature report
    std::vector<MomentRow> rows;
    double max_deviation_m2 = 0.0;
    double max_deviation_m4 = 0.0;
};

/// Deterministic moment propagation. At each step the conditional moments of
/// the implemented step map are integrated by Gauss-Hermite quadrature over
/// dB at probe states, giving E[Z'^2 | Z] = Z^2 + a and
/// E[Z'^4 | Z] = Z^4 + b Z^2 + c; the coefficients are then pushed through
/// the tower property. Real moments, so deviations are absolute.
MomentReport quadrature_moments(double kappa, double y0, double horizon, std::size_t steps,
                                std::size_t nodes = 20);

/// Monte Carlo moments over `paths` independent splitting runs.
MomentReport ensemble_moments(double kappa, double y0, double horizon, std::size_t steps,
                              std::size_t paths, std::uint64_t master_seed, unsigned workers = 1);

/// Rows whose deviation exceeds `z` standard errors in Re or Im.
std::vector<std::size_t> ensemble_breaches(const MomentReport& report, double z = 3.0);

}  // namespace sle
