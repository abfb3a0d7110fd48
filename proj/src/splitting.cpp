#include "sle/splitting.hpp"

#include <algorithm>
#include <cmath>

#include "sle/error.hpp"

namespace sle {

FidelitySchedule FidelitySchedule::theory(unsigned fidelity, double horizon) {
    if (fidelity < 1) throw ValidationError("fidelity N must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("time horizon must be positive");
    const double cells = 4.0 * fidelity + 1.0;
    FidelitySchedule s;
    s.mode = ScheduleMode::Theory;
    s.fidelity = fidelity;
    s.y0 = 1.0 / std::sqrt(static_cast<double>(fidelity));
    s.steps = static_cast<std::size_t>(std::ceil(horizon * cells * cells * cells));
    s.horizon = horizon;
    return s;
}

FidelitySchedule FidelitySchedule::practical(std::size_t steps, double y0, double horizon) {
    FidelitySchedule s;
    s.steps = steps;
    s.y0 = y0;
    s.horizon = horizon;
    s.validate();
    return s;
}

void FidelitySchedule::validate() const {
    if (!(y0 > 0.0) || !std::isfinite(y0)) throw ValidationError("initial height y0 must be > 0");
    if (steps < 1) throw ValidationError("step count M must be >= 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("time horizon must be positive");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Standard: return "sle";
        case Variant::NoiseReinforced: return "nrsle";
        case Variant::Fractional: return "fsle";
    }
    return "unknown";
}

Complex split_step(Complex z, double h, double translation) {
    const Complex half = sqrt_h(square(z) - 2.0 * h);
    return sqrt_h(square(half + translation) - 2.0 * h);
}

Complex sle_step(Complex z, double h, double dB, double kappa) {
    if (!(h > 0.0)) throw ValidationError("step size must be > 0");
    if (!(z.imag() > 0.0)) throw ValidationError("splitting step needs Im z > 0");
    if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
    return split_step(z, h, std::sqrt(kappa) * dB);
}

namespace {

Complex fractional_field(Complex z, double inv_hurst) {
    const double r = std::abs(z);
    return -2.0 * std::pow(r, -inv_hurst) * std::conj(z);
}

}  // namespace

Complex fsle_halfstep(Complex z, double h, double hurst, const FractionalIntegrator& integrator) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ValidationError("Hurst exponent must lie in (0, 1)");
    if (h < 0.0) throw ValidationError("step size must be >= 0");
    if (h == 0.0) return z;

    const double inv_hurst = 1.0 / hurst;
    double remaining = 0.5 * h;
    while (remaining > 0.0) {
        const double r = std::abs(z);
        if (!(r >= integrator.floor)) throw NumericError("fractional drift hit the singularity floor |z| < eps_z");
        // |field| = 2 r^(1 - 1/H); keep |field| dt <= relative_step * r.
        const double bound = 0.5 * integrator.relative_step * std::pow(r, inv_hurst);
        const double dt = std::min(remaining, bound);
        const Complex k1 = fractional_field(z, inv_hurst);
        const Complex k2 = fractional_field(z + 0.5 * dt * k1, inv_hurst);
        const Complex k3 = fractional_field(z + 0.5 * dt * k2, inv_hurst);
        const Complex k4 = fractional_field(z + dt * k3, inv_hurst);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        remaining = dt == remaining ? 0.0 : remaining - dt;
    }
    return z;
}

Trace run_splitting(Complex z0, const DrivingPath& force_path, Variant variant,
                    const FractionalIntegrator& integrator, std::vector<StepRecord>* records) {
    if (force_path.units != PathUnits::Force)
        throw ValidationError("run_splitting expects a driving path in force units");
    if (!(z0.imag() > 0.0)) throw ValidationError("splitting needs a start point with Im z0 > 0");

    const Mesh& mesh = force_path.mesh;
    Trace trace;
    trace.times.assign(mesh.times().begin(), mesh.times().end());
    trace.points.resize(mesh.size());
    trace.points[0] = z0;
    trace.spec = force_path.spec;
    trace.variant = variant;
    if (records) records->reserve(records->size() + mesh.steps());

    const double hurst = force_path.spec.hurst;
    Complex z = z0;
    for (std::size_t k = 0; k < mesh.steps(); ++k) {
        const double h = mesh.gap(k);
        const double translation = force_path.values[k + 1] - force_path.values[k];
        Complex half;
        Complex next;
        try {
            if (variant == Variant::Fractional) {
                half = fsle_halfstep(z, h, hurst, integrator);
                next = fsle_halfstep(half + translation, h, hurst, integrator);
            } else {
                half = sqrt_h(square(z) - 2.0 * h);
                next = sqrt_h(square(half + translation) - 2.0 * h);
            }
        } catch (const NumericError& e) {
            throw NumericError(e.what(), k);
        }
        if (!(next.imag() > 0.0) || !std::isfinite(next.real()) || !std::isfinite(next.imag()))
            throw NumericError("splitting state left the open upper half-plane", k);
        if (records) records->push_back({k, z, half, translation, next});
        z = next;
        trace.points[k + 1] = z;
    }
    return trace;
}

namespace {

Trace simulate_variant(const DrivingSpec& spec, const FidelitySchedule& schedule,
                       const SimulationOptions& options, Variant variant) {
    spec.validate();
    schedule.validate();
    const DrivingPath force = sample_driving(schedule.mesh(), spec).as_force();
    Trace trace = run_splitting(Complex(0.0, schedule.y0), force, variant, options.integrator);
    trace.schedule = schedule;
    if (options.shift_to_forward) {
        trace.applied_shift = force.values.back();
        for (Complex& p : trace.points) p += trace.applied_shift;
    }
    return trace;
}

}  // namespace

Trace simulate_sle(const DrivingSpec& spec, const FidelitySchedule& schedule, const SimulationOptions& options) {
    if (spec.kind != ProcessKind::StandardBM) throw ValidationError("simulate_sle needs a standard Brownian spec");
    return simulate_variant(spec, schedule, options, Variant::Standard);
}

Trace simulate_nrsle(const DrivingSpec& spec, const FidelitySchedule& schedule, const SimulationOptions& options) {
    if (spec.kind != ProcessKind::NoiseReinforced)
        throw ValidationError("simulate_nrsle needs a noise-reinforced spec");
    return simulate_variant(spec, schedule, options, Variant::NoiseReinforced);
}

Trace simulate_fsle(const DrivingSpec& spec, const FidelitySchedule& schedule, const SimulationOptions& options) {
    if (spec.kind != ProcessKind::Fractional) throw ValidationError("simulate_fsle needs a fractional spec");
    return simulate_variant(spec, schedule, options, Variant::Fractional);
}

Trace simulate(const DrivingSpec& spec, const FidelitySchedule& schedule, const SimulationOptions& options) {
    switch (spec.kind) {
        case ProcessKind::NoiseReinforced: return simulate_nrsle(spec, schedule, options);
        case ProcessKind::Fractional: return simulate_fsle(spec, schedule, options);
        case ProcessKind::StandardBM: break;
    }
    return simulate_sle(spec, schedule, options);
}

Complex dense_state(Complex z_k, double h, double full_translation, double tau, double partial) {
    const Complex first = sqrt_h(square(z_k) - 2.0 * tau);
    const Complex w = sqrt_h(square(z_k) - 2.0 * h) + full_translation;
    const Complex second = sqrt_h(square(w) - 2.0 * tau);
    return z_k + (first - z_k) + partial + (second - w);
}

}  // namespace sle
