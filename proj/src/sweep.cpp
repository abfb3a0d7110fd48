#include "sle/sweep.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "sle/error.hpp"
#include "sle/parallel.hpp"
#include "sle/rng.hpp"

namespace sle {

std::uint64_t sweep_path_seed(std::uint64_t master, std::size_t cell, std::size_t path) {
    return derive_seed(derive_seed(master, StreamTag::SweepCell, cell), StreamTag::Ensemble, path);
}

namespace {

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

SweepResult dimension_sweep(const SweepConfig& config) {
    if (config.kappas.empty() || config.hursts.empty()) throw ValidationError("sweep needs kappa and Hurst values");
    if (config.paths_per_cell < 1) throw ValidationError("sweep needs at least one path per cell");
    config.schedule.validate();

    const std::size_t nk = config.kappas.size();
    const std::size_t cells = nk * config.hursts.size();
    const std::size_t tasks = cells * config.paths_per_cell;

    struct Outcome {
        std::optional<double> slope;
        std::string failure;
    };
    std::vector<Outcome> outcomes(tasks);
    parallel_for(tasks, config.workers, [&](std::size_t task) {
        const std::size_t cell = task / config.paths_per_cell;
        const std::size_t path = task % config.paths_per_cell;
        const double kappa = config.kappas[cell % nk];
        const double hurst = config.hursts[cell / nk];
        try {
            const auto spec = DrivingSpec::fractional(kappa, hurst, sweep_path_seed(config.seed, cell, path));
            SimulationOptions options;
            options.integrator = config.integrator;
            const Trace trace = simulate_fsle(spec, config.schedule, options);
            outcomes[task].slope = box_dimension(trace, config.boxes).slope;
        } catch (const Error& e) {
            outcomes[task].failure = "path " + std::to_string(path) + ": " + e.what();
        }
    });

    SweepResult result;
    result.kappas = config.kappas;
    result.hursts = config.hursts;
    result.cells.resize(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        SweepCell& c = result.cells[cell];
        c.kappa = config.kappas[cell % nk];
        c.hurst = config.hursts[cell / nk];
        c.steps = config.schedule.steps;
        for (std::size_t path = 0; path < config.paths_per_cell; ++path) {
            const Outcome& o = outcomes[cell * config.paths_per_cell + path];
            if (o.slope) c.slopes.push_back(*o.slope);
            else c.failures.push_back(o.failure);
        }
        c.paths = c.slopes.size();
        if (c.paths == 0) {
            c.mean_df = c.stderr_df = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double sum = 0.0;
        for (double s : c.slopes) sum += s;
        c.mean_df = sum / static_cast<double>(c.paths);
        if (c.paths < 2) {
            c.stderr_df = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double ss = 0.0;
        for (double s : c.slopes) ss += (s - c.mean_df) * (s - c.mean_df);
        c.stderr_df = std::sqrt(ss / static_cast<double>(c.paths - 1) / static_cast<double>(c.paths));
    }

    // Pooled Kendall tau: pairs only within a fixed H (for kappa) or a fixed kappa (for H).
    double kappa_score = 0.0, kappa_pairs = 0.0, hurst_score = 0.0, hurst_pairs = 0.0;
    const std::size_t nh = config.hursts.size();
    for (std::size_t h = 0; h < nh; ++h)
        for (std::size_t i = 0; i < nk; ++i)
            for (std::size_t j = i + 1; j < nk; ++j) {
                const SweepCell& a = result.at(h, i);
                const SweepCell& b = result.at(h, j);
                if (a.paths == 0 || b.paths == 0) continue;
                kappa_score += sign(b.kappa - a.kappa) * sign(b.mean_df - a.mean_df);
                kappa_pairs += 1.0;
            }
    for (std::size_t k = 0; k < nk; ++k)
        for (std::size_t i = 0; i < nh; ++i)
            for (std::size_t j = i + 1; j < nh; ++j) {
                const SweepCell& a = result.at(i, k);
                const SweepCell& b = result.at(j, k);
                if (a.paths == 0 || b.paths == 0) continue;
                hurst_score += sign(b.hurst - a.hurst) * sign(a.mean_df - b.mean_df);
                hurst_pairs += 1.0;
            }
    result.tau_kappa = kappa_pairs > 0 ? kappa_score / kappa_pairs : 0.0;
    result.tau_hurst = hurst_pairs > 0 ? hurst_score / hurst_pairs : 0.0;
    return result;
}

}  // namespace sle
