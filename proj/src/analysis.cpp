#include "sle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>

#include "sle/error.hpp"

namespace sle {

namespace {

void check_horizons(const Trace& a, const Trace& b) {
    if (a.size() == 0 || b.size() == 0) throw ValidationError("cannot compare empty traces");
    if (a.times.size() != a.points.size() || b.times.size() != b.points.size())
        throw ValidationError("trace times and points differ in length");
    const double ta = a.horizon();
    const double tb = b.horizon();
    if (a.times.front() != b.times.front() || std::abs(ta - tb) > 1e-12 * std::max(1.0, std::abs(ta)))
        throw ValidationError("traces cover mismatched horizons");
}

Complex interpolate(const Trace& trace, double t) {
    const auto& ts = trace.times;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end()) return trace.points.back();
    const auto j = static_cast<std::size_t>(it - ts.begin());
    if (*it == t || j == 0) return trace.points[j];
    const double u = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    return trace.points[j - 1] + u * (trace.points[j] - trace.points[j - 1]);
}

/// Aligned times and pointwise distances |a(t) - b(t)|.
std::pair<std::vector<double>, std::vector<double>> aligned_gaps(const Trace& a, const Trace& b,
                                                                 Alignment alignment) {
    check_horizons(a, b);
    std::vector<double> times;
    if (alignment == Alignment::UnionMesh) {
        std::set_union(a.times.begin(), a.times.end(), b.times.begin(), b.times.end(), std::back_inserter(times));
    } else {
        std::set_intersection(a.times.begin(), a.times.end(), b.times.begin(), b.times.end(),
                              std::back_inserter(times));
        if (times.empty()) throw ValidationError("traces share no mesh times");
    }
    std::vector<double> gaps(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
        gaps[k] = std::abs(interpolate(a, times[k]) - interpolate(b, times[k]));
    return {std::move(times), std::move(gaps)};
}

struct BoundingBox {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = std::numeric_limits<double>::infinity();
    double x1 = -std::numeric_limits<double>::infinity();
    double y1 = -std::numeric_limits<double>::infinity();

    explicit BoundingBox(std::span<const Complex> points) {
        for (const Complex& p : points) {
            x0 = std::min(x0, p.real());
            x1 = std::max(x1, p.real());
            y0 = std::min(y0, p.imag());
            y1 = std::max(y1, p.imag());
        }
    }
    double diagonal() const { return std::hypot(x1 - x0, y1 - y0); }
};

std::vector<double> geometric_ladder(double diag, std::size_t count, double coarse, double fine) {
    std::vector<double> scales(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double e = count == 1 ? coarse : coarse + (fine - coarse) * static_cast<double>(j) / (count - 1.0);
        scales[j] = diag * std::exp2(-e);
    }
    return scales;
}

std::vector<Complex> densify(std::span<const Complex> points, double spacing) {
    std::vector<Complex> out;
    out.reserve(points.size());
    out.push_back(points[0]);
    for (std::size_t k = 1; k < points.size(); ++k) {
        const Complex a = points[k - 1];
        const Complex d = points[k] - a;
        const auto pieces = static_cast<std::size_t>(std::ceil(std::abs(d) / spacing));
        for (std::size_t j = 1; j < pieces; ++j) out.push_back(a + (static_cast<double>(j) / pieces) * d);
        out.push_back(points[k]);
    }
    return out;
}

std::size_t count_boxes(std::span<const Complex> points, double x0, double y0, double eps,
                        std::vector<std::uint64_t>& keys) {
    keys.clear();
    for (const Complex& p : points) {
        const auto i = static_cast<std::uint64_t>(std::floor((p.real() - x0) / eps));
        const auto j = static_cast<std::uint64_t>(std::floor((p.imag() - y0) / eps));
        keys.push_back((i << 32) | (j & 0xffffffffULL));
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

std::span<const Complex> trace_points(const Trace& trace) { return trace.points; }

}  // namespace

double sup_distance(const Trace& a, const Trace& b, Alignment alignment) {
    const auto [times, gaps] = aligned_gaps(a, b, alignment);
    return *std::max_element(gaps.begin(), gaps.end());
}

double lp_distance(const Trace& a, const Trace& b, double p, Alignment alignment, bool allow_small_p) {
    if (!(p >= 2.0) && !(allow_small_p && p > 0.0))
        throw ValidationError("L^p distance needs p >= 2 (pass allow_small_p to relax)");
    const auto [times, gaps] = aligned_gaps(a, b, alignment);
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        integral += 0.5 * (times[k + 1] - times[k]) * (std::pow(gaps[k], p) + std::pow(gaps[k + 1], p));
    return std::pow(integral, 1.0 / p);
}

DimensionFit fit_log_log(std::span<const double> scales, std::span<const double> counts) {
    const std::size_t n = scales.size();
    double sx = 0, sy = 0;
    for (std::size_t j = 0; j < n; ++j) {
        sx += std::log(1.0 / scales[j]);
        sy += std::log(counts[j]);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dx = std::log(1.0 / scales[j]) - mx;
        const double dy = std::log(counts[j]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    DimensionFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    fit.scales.assign(scales.begin(), scales.end());
    fit.counts.assign(counts.begin(), counts.end());
    return fit;
}

std::vector<double> box_counts(std::span<const Complex> points, std::span<const double> scales, bool polyline,
                               double densify_fraction, bool multi_offset) {
    const BoundingBox box(points);
    std::vector<Complex> dense;
    if (polyline && points.size() > 1) {
        const double eps_min = *std::min_element(scales.begin(), scales.end());
        dense = densify(points, densify_fraction * eps_min);
        points = dense;
    }
    static constexpr double kOffsets[4][2] = {{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}};
    const int offsets = multi_offset ? 4 : 1;
    std::vector<std::uint64_t> keys;
    keys.reserve(points.size());
    std::vector<double> counts;
    counts.reserve(scales.size());
    for (double eps : scales) {
        double total = 0.0;
        for (int o = 0; o < offsets; ++o)
            total += static_cast<double>(
                count_boxes(points, box.x0 - kOffsets[o][0] * eps, box.y0 - kOffsets[o][1] * eps, eps, keys));
        counts.push_back(total / offsets);
    }
    return counts;
}

DimensionFit box_dimension(std::span<const Complex> points, const BoxScaleSpec& spec, bool polyline) {
    if (points.size() < 2) throw ValidationError("box counting needs at least two points");
    if (spec.count < 4) throw ValidationError("box counting needs at least 4 scales");
    const double diag = BoundingBox(points).diagonal();
    if (!(diag > 0.0) || !std::isfinite(diag)) throw ValidationError("degenerate bounding box");

    const auto scales = geometric_ladder(diag, spec.count, spec.coarse_exponent, spec.fine_exponent);
    const auto counts = box_counts(points, scales, polyline, spec.densify_fraction, spec.multi_offset);
    std::vector<double> used_scales;
    std::vector<double> used_counts;
    for (std::size_t j = 0; j < scales.size(); ++j) {
        if (counts[j] >= 2.0) {
            used_scales.push_back(scales[j]);
            used_counts.push_back(counts[j]);
        }
    }
    if (used_scales.size() < 4) throw ValidationError("fewer than 4 usable box scales");
    return fit_log_log(used_scales, used_counts);
}

DimensionFit box_dimension(const Trace& trace, const BoxScaleSpec& spec) {
    return box_dimension(trace_points(trace), spec, true);
}

double ruler_steps(std::span<const Complex> points, double ruler) {
    if (points.size() < 2) return 0.0;
    const std::size_t n = points.size();
    Complex here = points[0];
    std::size_t next = 1;
    double steps = 0.0;
    for (;;) {
        std::size_t j = next;
        while (j < n && std::abs(points[j] - here) < ruler) ++j;
        if (j == n) break;
        // The crossing lies on [start, points[j]], where start is within the ruler.
        const Complex start = j == next ? here : points[j - 1];
        const Complex d = points[j] - start;
        const Complex f = start - here;
        const double a = std::norm(d);
        const double b = 2.0 * (f.real() * d.real() + f.imag() * d.imag());
        const double c = std::norm(f) - ruler * ruler;
        const double u = std::min(1.0, (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a));
        here = start + u * d;
        next = j;
        steps += 1.0;
    }
    return steps + std::abs(points.back() - here) / ruler;
}

DimensionFit yardstick_dimension(std::span<const Complex> points, const RulerSpec& spec) {
    if (points.size() < 2) throw ValidationError("yardstick needs at least two points");
    if (spec.count < 4) throw ValidationError("yardstick needs at least 4 rulers");
    const double diag = BoundingBox(points).diagonal();
    if (!(diag > 0.0) || !std::isfinite(diag)) throw ValidationError("degenerate bounding box");

    const auto rulers = geometric_ladder(diag, spec.count, spec.coarse_exponent, spec.fine_exponent);
    std::vector<double> used_rulers;
    std::vector<double> steps;
    for (double ell : rulers) {
        const double n = ruler_steps(points, ell);
        if (n > 0.0) {
            used_rulers.push_back(ell);
            steps.push_back(n);
        }
    }
    if (used_rulers.size() < 4) throw ValidationError("fewer than 4 usable rulers");
    return fit_log_log(used_rulers, steps);
}

DimensionFit yardstick_dimension(const Trace& trace, const RulerSpec& spec) {
    return yardstick_dimension(trace_points(trace), spec);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("kendall_tau needs equally long sequences");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[j] - x[i];
            const double dy = y[j] - y[i];
            s += static_cast<double>((dx > 0) - (dx < 0)) * static_cast<double>((dy > 0) - (dy < 0));
        }
    return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace sle
