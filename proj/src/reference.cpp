#include "sle/reference.hpp"

#include <algorithm>
#include <cmath>

#include "sle/error.hpp"

namespace sle {

Trace euler_reverse(Complex z0, const DrivingPath& path, double kappa) {
    if (!(z0.imag() > 0.0)) throw ValidationError("Euler oracle needs Im z0 > 0");
    if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
    const double scale = path.units == PathUnits::Process ? std::sqrt(kappa) : 1.0;
    const Mesh& mesh = path.mesh;

    Trace trace;
    trace.times.assign(mesh.times().begin(), mesh.times().end());
    trace.points.resize(mesh.size());
    trace.points[0] = z0;
    trace.spec = path.spec;
    trace.spec.kappa = kappa;
    Complex z = z0;
    for (std::size_t k = 0; k < mesh.steps(); ++k) {
        const double h = mesh.gap(k);
        const double dF = scale * (path.values[k + 1] - path.values[k]);
        z = z - 2.0 * h * std::conj(z) / std::norm(z) + dF;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericError("Euler state is not finite", k);
        if (!(z.imag() > 0.0)) throw NumericError("Euler step crossed the real axis", k);
        trace.points[k + 1] = z;
    }
    return trace;
}

void PiecewiseConstantDriving::validate() const {
    if (breakpoints.size() < 2) throw ValidationError("piecewise driving needs at least one interval");
    if (levels.size() + 1 != breakpoints.size())
        throw ValidationError("piecewise driving needs one level per interval");
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
        if (!(breakpoints[j + 1] > breakpoints[j]))
            throw ValidationError("piecewise driving breakpoints must be strictly increasing");
}

double PiecewiseConstantDriving::level_at(double t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    std::size_t j = it == breakpoints.begin() ? 0 : static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    return levels[std::min(j, levels.size() - 1)];
}

PiecewiseConstantDriving splitting_legs(const DrivingPath& force_path) {
    if (force_path.units != PathUnits::Force)
        throw ValidationError("splitting_legs expects a driving path in force units");
    const Mesh& mesh = force_path.mesh;
    if (mesh.size() < 2) throw ValidationError("splitting_legs needs at least one step");

    PiecewiseConstantDriving legs;
    legs.breakpoints.push_back(mesh[0]);
    legs.levels.push_back(-force_path.values[0]);
    for (std::size_t k = 0; k < mesh.steps(); ++k) {
        legs.breakpoints.push_back(mesh[k] + 0.5 * mesh.gap(k));
        legs.levels.push_back(-force_path.values[k + 1]);
    }
    legs.breakpoints.push_back(mesh.horizon());
    return legs;
}

Trace exact_piecewise_trace(Complex z0, const PiecewiseConstantDriving& driving,
                            std::span<const double> sample_times) {
    driving.validate();
    if (!(z0.imag() > 0.0)) throw ValidationError("exact composition needs Im z0 > 0");

    std::vector<double> events(driving.breakpoints.begin(), driving.breakpoints.end());
    for (double t : sample_times)
        if (t >= driving.breakpoints.front() && t <= driving.horizon()) events.push_back(t);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    Trace trace;
    trace.times = events;
    trace.points.reserve(events.size());

    // State relative to the current level, Z = h - lambda, so each leg is
    // slit_reverse with level 0 and a level change is a real translation.
    Complex z = z0;
    double now = events.front();
    std::size_t leg = 0;
    trace.points.push_back(z);
    for (std::size_t e = 1; e < events.size(); ++e) {
        const double t = events[e];
        z = slit_reverse(z, 0.0, t - now);
        now = t;
        if (leg + 1 < driving.levels.size() && t == driving.breakpoints[leg + 1]) {
            z += driving.levels[leg] - driving.levels[leg + 1];
            ++leg;
        }
        trace.points.push_back(z);
    }
    return trace;
}

namespace {

struct LinearDriving {
    const Mesh& mesh;
    const std::vector<double>& values;

    double at(std::size_t cell, double t) const {
        const double h = mesh.gap(cell);
        const double u = (t - mesh[cell]) / h;
        return values[cell] + u * (values[cell + 1] - values[cell]);
    }
};

}  // namespace

Complex forward_point(Complex z0, const DrivingPath& driving, const ForwardOptions& options) {
    if (!(z0.imag() > 0.0)) throw ValidationError("forward integration needs Im z0 > 0");
    const Mesh& mesh = driving.mesh;
    const LinearDriving lambda{mesh, driving.values};
    auto field = [&](std::size_t cell, double t, Complex g) { return 2.0 / (g - lambda.at(cell, t)); };

    Complex g = z0;
    for (std::size_t cell = 0; cell < mesh.steps(); ++cell) {
        const double end = mesh[cell + 1];
        const double slope = std::abs(driving.values[cell + 1] - driving.values[cell]) / mesh.gap(cell);
        double t = mesh[cell];
        while (t < end) {
            const double gap = std::abs(g - lambda.at(cell, t));
            if (gap < options.swallow_eps) throw SwallowedError(t, gap);
            double dt = std::min(end - t, 0.5 * options.relative_step * gap * gap);
            if (slope > 0.0) dt = std::min(dt, options.relative_step * gap / slope);
            const Complex k1 = field(cell, t, g);
            const Complex k2 = field(cell, t + 0.5 * dt, g + 0.5 * dt * k1);
            const Complex k3 = field(cell, t + 0.5 * dt, g + 0.5 * dt * k2);
            const Complex k4 = field(cell, t + dt, g + dt * k3);
            g += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = dt == end - t ? end : t + dt;
        }
    }
    const double gap = std::abs(g - driving.values.back());
    if (gap < options.swallow_eps) throw SwallowedError(mesh.horizon(), gap);
    return g;
}

}  // namespace sle
