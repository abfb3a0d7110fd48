#pragma once

#include <span>
#include <vector>

#include "sle/driving.hpp"
#include "sle/splitting.hpp"

namespace sle {

/// Euler-Maruyama on dZ = -2/Z dt + dF. Process-unit paths are scaled by
/// sqrt(kappa); force-unit paths are used as they are. Aborts with the step
/// index when Im Z leaves the half-plane.
Trace euler_reverse(Complex z0, const DrivingPath& path, double kappa);

/// Cadlag step function: levels[j] holds on [breakpoints[j], breakpoints[j+1]).
struct PiecewiseConstantDriving {
    std::vector<double> breakpoints;
    std::vector<double> levels;

    void validate() const;
    double horizon() const { return breakpoints.back(); }
    double level_at(double t) const;
};

/// The leg structure a splitting run on `force_path` realizes: level 0 on
/// [0, h_0/2), then -F(t_{k+1}) on [t_k + h_k/2, t_{k+1} + h_{k+1}/2), the last
/// leg ending at T.
PiecewiseConstantDriving splitting_legs(const DrivingPath& force_path);

/// Reverse Loewner flow under piecewise-constant driving, composed exactly
/// from slit maps. Reported points are h(t) - lambda(t), evaluated at the
/// breakpoints plus any extra `sample_times`.
Trace exact_piecewise_trace(Complex z0, const PiecewiseConstantDriving& driving,
                            std::span<const double> sample_times = {});

struct ForwardOptions {
    double swallow_eps = 1e-6;
    /// Substep bound relative to |g - lambda|.
    double relative_step = 1e-2;
};

/// Forward Loewner ODE dg/dt = 2 / (g - lambda(t)) for one point, with lambda
/// the piecewise-linear interpolant of `driving.values`. RK4 with adaptive
/// substeps; throws SwallowedError when |g - lambda| < swallow_eps.
Complex forward_point(Complex z0, const DrivingPath& driving, const ForwardOptions& options = {});

}  // namespace sle
