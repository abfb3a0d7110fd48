#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sle/halfplane.hpp"
#include "sle/splitting.hpp"

namespace sle {

enum class Alignment {
    /// Both traces linearly interpolated onto the union of their meshes.
    UnionMesh,
    /// Only times present in both meshes (nested dyadic meshes).
    CommonTimes,
};

double sup_distance(const Trace& a, const Trace& b, Alignment alignment = Alignment::UnionMesh);

/// (int_0^T |a - b|^p dt)^(1/p), trapezoid rule. p < 2 is rejected unless
/// `allow_small_p` is set.
double lp_distance(const Trace& a, const Trace& b, double p,
                   Alignment alignment = Alignment::UnionMesh, bool allow_small_p = false);

struct DimensionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> scales;
    std::vector<double> counts;
};

/// Geometric ladder of box sizes diag / 2^coarse ... diag / 2^fine.
struct BoxScaleSpec {
    std::size_t count = 12;
    double coarse_exponent = 3.0;
    double fine_exponent = 9.0;
    /// Average counts over 4 half-box grid offsets instead of a single anchored grid.
    bool multi_offset = false;
    /// Densify so consecutive samples are closer than densify_fraction * eps_min.
    double densify_fraction = 0.5;
};

struct RulerSpec {
    std::size_t count = 10;
    double coarse_exponent = 3.0;
    double fine_exponent = 8.0;
};

/// Box-counting dimension. `polyline` densifies consecutive points first; a
/// plain point cloud is counted as given.
DimensionFit box_dimension(std::span<const Complex> points, const BoxScaleSpec& spec = {},
                           bool polyline = true);
DimensionFit box_dimension(const Trace& trace, const BoxScaleSpec& spec = {});

/// Occupied-box counts of the (optionally densified) point set, per scale.
std::vector<double> box_counts(std::span<const Complex> points, std::span<const double> scales,
                               bool polyline, double densify_fraction, bool multi_offset);

/// Divider dimension with sub-sample circle/segment crossings; n(l) includes
/// the fractional final step.
DimensionFit yardstick_dimension(std::span<const Complex> points, const RulerSpec& spec = {});
DimensionFit yardstick_dimension(const Trace& trace, const RulerSpec& spec = {});

/// Number of ruler steps of length `ruler` along the polyline.
double ruler_steps(std::span<const Complex> points, double ruler);

/// Ordinary least squares of y on x.
DimensionFit fit_log_log(std::span<const double> scales, std::span<const double> counts);

/// Kendall tau-a between two equally long sequences.
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace sle
