#include "sle/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "sle/error.hpp"
#include "sle/parallel.hpp"
#include "sle/reference.hpp"
#include "sle/rng.hpp"

namespace sle {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ConvergenceReport convergence_study(const ConvergenceConfig& config) {
    if (!(config.kappa >= 0.0)) throw ValidationError("kappa must be finite and >= 0");
    if (config.min_level > config.max_level) throw ValidationError("min level exceeds max level");
    if (config.max_level > 26) throw ValidationError("max level must be <= 26");
    if (config.paths < 1) throw ValidationError("need at least one path");
    const bool euler = config.reference == ConvergenceReference::FineEuler;
    if (euler && config.euler_level < config.max_level)
        throw ValidationError("Euler level must be at least the finest splitting level");
    if (!euler && config.min_level == config.max_level)
        throw ValidationError("self-convergence needs at least two levels");
    FidelitySchedule::practical(1, config.y0, config.horizon);

    const unsigned top = euler ? config.euler_level : config.max_level;
    const std::size_t measured = euler ? config.max_level - config.min_level + 1 : config.max_level - config.min_level;
    std::vector<std::vector<double>> sup(measured, std::vector<double>(config.paths));
    std::vector<std::vector<double>> l2(measured, std::vector<double>(config.paths));

    parallel_for(config.paths, config.workers, [&](std::size_t i) {
        DrivingSpec spec = DrivingSpec::standard(config.kappa, path_seed(config.seed, i));
        DrivingPath base = sample_bm(Mesh::uniform(config.horizon, std::size_t{1} << config.min_level), spec.seed);
        base.spec = spec;
        const Complex z0(0.0, config.y0);
        auto run = [&](unsigned level) {
            const DrivingPath path = refine_bm(base, 1u << (level - config.min_level)).as_force();
            return run_splitting(z0, path, Variant::Standard);
        };
        if (euler) {
            const Trace fine = euler_reverse(z0, refine_bm(base, 1u << (top - config.min_level)), config.kappa);
            for (unsigned l = config.min_level; l <= config.max_level; ++l) {
                const Trace coarse = run(l);
                sup[l - config.min_level][i] = sup_distance(coarse, fine, Alignment::CommonTimes);
                l2[l - config.min_level][i] = lp_distance(coarse, fine, 2.0, Alignment::CommonTimes);
            }
        } else {
            Trace previous = run(config.min_level);
            for (unsigned l = config.min_level + 1; l <= config.max_level; ++l) {
                Trace next = run(l);
                sup[l - 1 - config.min_level][i] = sup_distance(previous, next, Alignment::CommonTimes);
                l2[l - 1 - config.min_level][i] = lp_distance(previous, next, 2.0, Alignment::CommonTimes);
                previous = std::move(next);
            }
        }
    });

    ConvergenceReport report;
    report.config = config;
    for (std::size_t j = 0; j < measured; ++j) {
        ConvergenceLevel row;
        row.level = config.min_level + static_cast<unsigned>(j);
        row.steps = std::size_t{1} << row.level;
        row.sup = sup[j];
        row.l2 = l2[j];
        row.median_sup = median(sup[j]);
        row.median_l2 = median(l2[j]);
        report.levels.push_back(std::move(row));
    }

    bool decreasing = true;
    bool exact = true;
    for (std::size_t j = 0; j < measured; ++j) {
        for (double d : report.levels[j].sup) exact = exact && d <= ConvergenceReport::exact_floor;
        if (j > 0 && !(report.levels[j].median_sup < report.levels[j - 1].median_sup)) decreasing = false;
    }
    report.monotone = decreasing || exact;

    std::vector<double> scales;
    std::vector<double> errors;
    for (const ConvergenceLevel& row : report.levels) {
        if (row.median_sup > 0.0) {
            scales.push_back(std::exp2(-static_cast<double>(row.level)));
            errors.push_back(row.median_sup);
        }
    }
    // fit_log_log regresses log(count) on log(1/scale); the error order is the negated slope.
    report.empirical_order = scales.size() >= 2 ? -fit_log_log(scales, errors).slope : 0.0;
    return report;
}

}  // namespace sle
