#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sle/analysis.hpp"
#include "sle/splitting.hpp"

namespace sle {

struct SweepCell {
    double kappa = 0.0;
    double hurst = 0.5;
    std::size_t paths = 0;  ///< paths that completed
    std::size_t steps = 0;
    double mean_df = 0.0;
    double stderr_df = 0.0;
    std::vector<double> slopes;
    std::vector<std::string> failures;
};

struct SweepResult {
    std::vector<SweepCell> cells;  ///< row-major: hurst outer, kappa inner
    std::vector<double> kappas;
    std::vector<double> hursts;
    /// Kendall tau of D_f against kappa, pooled over pairs within each H.
    double tau_kappa = 0.0;
    /// Kendall tau of D_f against -H, pooled over pairs within each kappa.
    double tau_hurst = 0.0;

    const SweepCell& at(std::size_t hurst_index, std::size_t kappa_index) const {
        return cells[hurst_index * kappas.size() + kappa_index];
    }
    bool monotone(double threshold = 0.6) const {
        return tau_kappa >= threshold && tau_hurst >= threshold;
    }
};

struct SweepConfig {
    std::vector<double> kappas;
    std::vector<double> hursts;
    std::size_t paths_per_cell = 5;
    FidelitySchedule schedule = FidelitySchedule::practical(1u << 14, 0.01, 1.0);
    BoxScaleSpec boxes{};
    FractionalIntegrator integrator{};
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// fSLE box-dimension table over the kappa x H grid. Failed paths are recorded
/// per cell and the sweep continues.
SweepResult dimension_sweep(const SweepConfig& config);

/// Seed of path `path` in cell `cell`.
std::uint64_t sweep_path_seed(std::uint64_t master, std::size_t cell, std::size_t path);

}  // namespace sle
