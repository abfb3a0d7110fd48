#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sle/analysis.hpp"

namespace sle {

/// What each splitting level is measured against.
enum class ConvergenceReference {
    /// Level l against level l + 1 (self-convergence).
    NextLevel,
    /// Every level against Euler on the finest refinement of the same path.
    FineEuler,
};

struct ConvergenceConfig {
    double kappa = 2.0;
    double y0 = 0.1;
    double horizon = 1.0;
    unsigned min_level = 8;
    unsigned max_level = 13;
    std::size_t paths = 20;
    ConvergenceReference reference = ConvergenceReference::NextLevel;
    /// Euler mesh is 2^euler_level steps (FineEuler only).
    unsigned euler_level = 20;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct ConvergenceLevel {
    unsigned level = 0;
    std::size_t steps = 0;
    double median_sup = 0.0;
    double median_l2 = 0.0;
    std::vector<double> sup;  ///< per path
    std::vector<double> l2;
};

struct ConvergenceReport {
    ConvergenceConfig config;
    std::vector<ConvergenceLevel> levels;
    /// Least-squares slope of -log2(median sup) against level.
    double empirical_order = 0.0;
    /// Strictly decreasing medians, or every distance below `exact_floor`.
    bool monotone = false;
    static constexpr double exact_floor = 1e-12;
};

/// Strong-error study on one Brownian path per index, sampled at 2^min_level
/// steps and refined by Brownian bridges. Distances are taken at common mesh
/// times.
ConvergenceReport convergence_study(const ConvergenceConfig& config);

}  // namespace sle
