#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sle/driving.hpp"
#include "sle/halfplane.hpp"

namespace sle {

enum class ScheduleMode { Theory, Practical };

/// Step count, start height and horizon of a run. Theory mode derives them
/// from the fidelity N: y0 = N^(-1/2), M = ceil(T (4N+1)^3).
struct FidelitySchedule {
    ScheduleMode mode = ScheduleMode::Practical;
    unsigned fidelity = 0;
    std::size_t steps = 1;
    double y0 = 0.01;
    double horizon = 1.0;

    static FidelitySchedule theory(unsigned fidelity, double horizon);
    static FidelitySchedule practical(std::size_t steps, double y0, double horizon);

    void validate() const;
    Mesh mesh() const { return Mesh::uniform(horizon, steps); }
};

enum class Variant { Standard, NoiseReinforced, Fractional };

std::string to_string(Variant v);

/// Integration policy for the non-holomorphic fractional drift.
struct FractionalIntegrator {
    /// Substep bound: |field| * dt <= relative_step * |z|.
    double relative_step = 5e-3;
    /// |z| below this aborts the step.
    double floor = 1e-8;
};

struct SimulationOptions {
    /// Add the realized real shift F_T to every point (forward-curve frame).
    bool shift_to_forward = false;
    FractionalIntegrator integrator{};
};

struct Trace {
    std::vector<double> times;
    std::vector<Complex> points;
    DrivingSpec spec{};
    FidelitySchedule schedule{};
    Variant variant = Variant::Standard;
    double applied_shift = 0.0;

    std::size_t size() const noexcept { return points.size(); }
    double horizon() const { return times.back(); }
};

struct StepRecord {
    std::size_t k = 0;
    Complex pre;
    Complex half;        ///< after the first drift half-step
    double translation;  ///< force increment added between half-steps
    Complex post;
};

/// One splitting step sqrt_h((sqrt_h(z^2 - 2h) + t)^2 - 2h) for a real
/// translation t. Both half-steps are exact flows of z' = -2/z over h/2.
Complex split_step(Complex z, double h, double translation);

/// split_step with translation sqrt(kappa) * dB. Throws on h <= 0 or Im z <= 0.
Complex sle_step(Complex z, double h, double dB, double kappa);

/// Flow of z' = -2 |z|^(2 - 1/H) / z over duration h/2 by classical RK4 with
/// adaptive substeps. Throws NumericError below the singularity floor.
Complex fsle_halfstep(Complex z, double h, double hurst, const FractionalIntegrator& integrator = {});

/// Core recursion over a force-unit driving path starting at z0.
/// Records each step into `records` when given.
Trace run_splitting(Complex z0, const DrivingPath& force_path, Variant variant,
                    const FractionalIntegrator& integrator = {},
                    std::vector<StepRecord>* records = nullptr);

Trace simulate_sle(const DrivingSpec& spec, const FidelitySchedule& schedule,
                   const SimulationOptions& options = {});
Trace simulate_nrsle(const DrivingSpec& spec, const FidelitySchedule& schedule,
                     const SimulationOptions& options = {});
Trace simulate_fsle(const DrivingSpec& spec, const FidelitySchedule& schedule,
                    const SimulationOptions& options = {});

/// Dispatch on spec.kind.
Trace simulate(const DrivingSpec& spec, const FidelitySchedule& schedule,
               const SimulationOptions& options = {});

/// Continuous interpolant of a standard splitting step at t_k + tau:
///   Z_k + (sqrt_h(Z_k^2 - 2 tau) - Z_k) + partial + (sqrt_h(W^2 - 2 tau) - W),
/// where W = sqrt_h(Z_k^2 - 2h) + full_translation and `partial` is the force
/// increment accrued over [t_k, t_k + tau]. Equals split_step at tau = h.
Complex dense_state(Complex z_k, double h, double full_translation, double tau, double partial);

}  // namespace sle
