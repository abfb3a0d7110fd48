#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "sle/analysis.hpp"
#include "sle/convergence.hpp"
#include "sle/error.hpp"
#include "sle/rng.hpp"
#include "sle/splitting.hpp"
#include "sle/sweep.hpp"
#include "support.hpp"

using namespace sle;
using sle::test::Draw;
using sle::test::kEps;

namespace {

Trace make_trace(std::vector<double> times, std::vector<Complex> points) {
    Trace t;
    t.times = std::move(times);
    t.points = std::move(points);
    return t;
}

Trace random_trace(Draw& draw, std::size_t n, double horizon) {
    Trace t;
    for (std::size_t k = 0; k < n; ++k) {
        t.times.push_back(horizon * static_cast<double>(k) / static_cast<double>(n - 1));
        t.points.push_back(draw.upper(2.0, 0.0, 2.0));
    }
    return t;
}

std::vector<Complex> segment(std::size_t n, Complex a, Complex b) {
    std::vector<Complex> pts;
    for (std::size_t k = 0; k < n; ++k) pts.push_back(a + (static_cast<double>(k) / (n - 1.0)) * (b - a));
    return pts;
}

// Distinct values of floor(x / eps) over a 1-d lattice i / (n - 1).
double lattice_axis_count(std::size_t n, double eps) {
    std::set<long long> cells;
    for (std::size_t i = 0; i < n; ++i)
        cells.insert(static_cast<long long>(std::floor((static_cast<double>(i) / (n - 1.0)) / eps)));
    return static_cast<double>(cells.size());
}

Trace sle_trace(double kappa, std::size_t steps, std::uint64_t seed) {
    return simulate_sle(DrivingSpec::standard(kappa, seed), FidelitySchedule::practical(steps, 0.01, 1.0));
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("sup distance") {
    const Trace a = make_trace({0.0, 0.5, 1.0}, {{0.0, 1.0}, {0.0, 2.0}, {0.0, 3.0}});
    CHECK(sup_distance(a, a) == 0.0);
    Trace b = a;
    for (Complex& p : b.points) p += 0.1;
    CHECK(sup_distance(a, b) == 0.1);
    CHECK(sup_distance(b, a) == 0.1);

    // Union mesh: c is linear between its two samples, so it meets a at t = 0.5.
    const Trace c = make_trace({0.0, 1.0}, {{0.0, 1.0}, {0.0, 3.0}});
    CHECK(sup_distance(a, c) == 0.0);
    const Trace d = make_trace({0.0, 1.0}, {{0.0, 1.0}, {0.0, 1.0}});
    CHECK(sup_distance(a, d) == doctest::Approx(2.0));
    CHECK(sup_distance(a, d, Alignment::CommonTimes) == doctest::Approx(2.0));

    const Trace short_trace = make_trace({0.0, 0.5}, {{0.0, 1.0}, {0.0, 2.0}});
    CHECK_THROWS_AS(sup_distance(a, short_trace), ValidationError);
    CHECK_THROWS_AS(sup_distance(a, Trace{}), ValidationError);
    const Trace offgrid = make_trace({0.0, 0.3, 1.0}, {{0.0, 1.0}, {0.0, 2.0}, {0.0, 3.0}});
    CHECK(sup_distance(a, offgrid, Alignment::CommonTimes) == 0.0);
}

TEST_CASE("L^p distance") {
    const double c = 0.3;
    for (double horizon : {1.0, 2.5}) {
        Trace a = make_trace({0.0, 0.2 * horizon, horizon}, {{0.0, 1.0}, {1.0, 2.0}, {-1.0, 1.0}});
        Trace b = a;
        for (Complex& p : b.points) p += Complex(0.0, c);
        CHECK(lp_distance(a, a, 2.0) == 0.0);
        for (double p : {2.0, 3.0, 7.5})
            CHECK(lp_distance(a, b, p) == doctest::Approx(c * std::pow(horizon, 1.0 / p)).epsilon(1e-14));
    }
    const Trace a = make_trace({0.0, 1.0}, {{0.0, 1.0}, {0.0, 1.0}});
    CHECK_THROWS_AS(lp_distance(a, a, 1.0), ValidationError);
    CHECK_THROWS_AS(lp_distance(a, a, 1.99), ValidationError);
    CHECK(lp_distance(a, a, 1.0, Alignment::UnionMesh, true) == 0.0);
    CHECK_THROWS_AS(lp_distance(a, a, 0.0, Alignment::UnionMesh, true), ValidationError);
}

TEST_CASE("distances are pseudometrics") {
    Draw draw(51);
    for (int i = 0; i < 500; ++i) {
        const double horizon = draw.uniform(0.5, 3.0);
        const Trace a = random_trace(draw, 17, horizon);
        const Trace b = random_trace(draw, 33, horizon);
        const Trace c = random_trace(draw, 9, horizon);
        const double ab = sup_distance(a, b), ba = sup_distance(b, a);
        REQUIRE(ab == ba);
        REQUIRE(sup_distance(a, c) <= (ab + sup_distance(b, c)) * (1.0 + 4.0 * kEps));
        for (double p : {2.0, 4.0}) {
            const double lab = lp_distance(a, b, p);
            REQUIRE(lab == lp_distance(b, a, p));
            REQUIRE(lp_distance(a, c, p) <= (lab + lp_distance(b, c, p)) * (1.0 + 4.0 * kEps));
            REQUIRE(lab <= ab * std::pow(horizon, 1.0 / p) * (1.0 + 4.0 * kEps));
        }
    }
}

TEST_CASE("least squares and Kendall tau") {
    const std::vector<double> scales{1.0, 0.5, 0.25, 0.125};
    const std::vector<double> counts{3.0, 12.0, 48.0, 192.0};
    const DimensionFit fit = fit_log_log(scales, counts);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
    CHECK(fit.r_squared == doctest::Approx(1.0));

    const std::vector<double> up{1, 2, 3, 4}, down{4, 3, 2, 1}, mixed{1, 3, 2, 4};
    CHECK(kendall_tau(up, up) == 1.0);
    CHECK(kendall_tau(up, down) == -1.0);
    CHECK(kendall_tau(up, mixed) == doctest::Approx(4.0 / 6.0));
    CHECK_THROWS_AS(kendall_tau(up, std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("box dimension of a straight segment") {
    const auto pts = segment(1000, {0.0, 0.0}, {1.0, 0.0});
    const DimensionFit fit = box_dimension(pts);
    CHECK(fit.slope >= 0.95);
    CHECK(fit.slope <= 1.05);
    CHECK(fit.r_squared >= 0.999);
    CHECK(fit.scales.size() == 12);
    const auto tilted = segment(1000, {0.3, 0.1}, {2.0, 1.4});
    CHECK(box_dimension(tilted).slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("box counts on a lattice match an axis-product oracle") {
    for (std::size_t n : {17u, 64u, 100u}) {
        std::vector<Complex> grid;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) grid.emplace_back(i / (n - 1.0), j / (n - 1.0));
        const std::vector<double> scales{0.5, 0.3, 0.1, 0.07, 0.013};
        const auto counts = box_counts(grid, scales, false, 0.5, false);
        for (std::size_t s = 0; s < scales.size(); ++s) {
            const double axis = lattice_axis_count(n, scales[s]);
            CHECK(counts[s] == axis * axis);
        }
    }
}

TEST_CASE("box dimension of a filled square") {
    std::vector<Complex> grid;
    for (int i = 0; i < 512; ++i)
        for (int j = 0; j < 512; ++j) grid.emplace_back(i / 511.0, j / 511.0);
    const DimensionFit fit = box_dimension(grid, BoxScaleSpec{}, false);
    MESSAGE("filled square slope " << fit.slope);
    CHECK(fit.slope >= 1.9);
    CHECK(fit.slope <= 2.0);
}

TEST_CASE("box dimension rejects degenerate input") {
    const std::vector<Complex> same(100, Complex(1.0, 1.0));
    CHECK_THROWS_AS(box_dimension(same), ValidationError);
    CHECK_THROWS_AS(box_dimension(std::vector<Complex>{{0.0, 0.0}}), ValidationError);
    BoxScaleSpec few;
    few.count = 3;
    CHECK_THROWS_AS(box_dimension(segment(100, 0.0, 1.0), few), ValidationError);
    BoxScaleSpec huge;
    huge.coarse_exponent = -4.0;
    huge.fine_exponent = -1.0;
    CHECK_THROWS_AS(box_dimension(segment(100, 0.0, 1.0), huge), ValidationError);
    CHECK_THROWS_AS(yardstick_dimension(same), ValidationError);
}

TEST_CASE("yardstick on a straight segment") {
    const auto pts = segment(1000, {0.0, 0.0}, {3.0, 4.0});
    CHECK(ruler_steps(pts, 1.0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(ruler_steps(pts, 0.3) == doctest::Approx(5.0 / 0.3).epsilon(1e-12));
    // Sparse samples: the crossing is found inside segments, not at vertices.
    const auto sparse = segment(4, {0.0, 0.0}, {3.0, 4.0});
    CHECK(ruler_steps(sparse, 0.7) == doctest::Approx(5.0 / 0.7).epsilon(1e-12));
    const DimensionFit fit = yardstick_dimension(pts);
    CHECK(fit.slope >= 0.97);
    CHECK(fit.slope <= 1.03);
}

TEST_CASE("circle polyline has dimension 1") {
    std::vector<Complex> circle;
    for (int k = 0; k <= 1000; ++k) circle.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 1000.0));
    const double yard = yardstick_dimension(circle).slope;
    const double box = box_dimension(circle).slope;
    MESSAGE("circle: yardstick " << yard << ", box " << box);
    CHECK(yard >= 0.95);
    CHECK(yard <= 1.05);
    CHECK(box >= 0.95);
    CHECK(box <= 1.05);
}

TEST_CASE("box dimension is invariant under rigid motion") {
    const Trace t = sle_trace(4.0, 1u << 14, 52);
    Draw draw(53);
    SUBCASE("translation") {
        const double base = box_dimension(t).slope;
        for (int i = 0; i < 8; ++i) {
            const Complex shift(draw.uniform(-10.0, 10.0), draw.uniform(-10.0, 10.0));
            std::vector<Complex> moved;
            for (const Complex& p : t.points) moved.push_back(p + shift);
            CHECK(std::abs(box_dimension(moved).slope - base) <= 0.02);
        }
    }
    SUBCASE("rotation with offset averaging") {
        // A rotated curve has a different bounding box and so a different
        // grid; the four-offset average absorbs most of that.
        BoxScaleSpec spec;
        spec.multi_offset = true;
        const double base = box_dimension(t, spec).slope;
        for (int i = 0; i < 8; ++i) {
            const Complex shift(draw.uniform(-10.0, 10.0), draw.uniform(-10.0, 10.0));
            const Complex turn = std::polar(1.0, draw.uniform(0.0, 2.0 * std::numbers::pi));
            std::vector<Complex> moved;
            for (const Complex& p : t.points) moved.push_back(p * turn + shift);
            const double slope = box_dimension(moved, spec).slope;
            CHECK_MESSAGE(std::abs(slope - base) <= 0.02, "slope " << slope << " vs " << base);
        }
    }
}

TEST_CASE("densification threshold is fine enough") {
    for (std::uint64_t seed : {61u, 62u, 63u}) {
        const Trace t = sle_trace(4.0, 1u << 14, seed);
        const DimensionFit fit = box_dimension(t);
        const auto half = box_counts(t.points, fit.scales, true, 0.25, false);
        for (std::size_t j = 0; j < half.size(); ++j)
            CHECK(std::abs(half[j] - fit.counts[j]) <= 0.01 * fit.counts[j]);
    }
}

TEST_CASE("multi-offset counts average four grids") {
    const auto pts = segment(200, {0.0, 0.0}, {0.9, 0.0});
    const std::vector<double> scales{0.25};
    // Anchored grid: columns 0..3. Shifted by half a box: columns 0..4.
    CHECK(box_counts(pts, scales, true, 0.5, false)[0] == 4.0);
    CHECK(box_counts(pts, scales, true, 0.5, true)[0] == doctest::Approx((4.0 + 5.0 + 4.0 + 5.0) / 4.0));
}

TEST_CASE("sweep smoke and determinism") {
    SweepConfig cfg;
    cfg.kappas = {3.0};
    cfg.hursts = {0.6};
    cfg.paths_per_cell = 1;
    cfg.schedule = FidelitySchedule::practical(1u << 8, 0.01, 1.0);
    cfg.seed = 5;
    const SweepResult one = dimension_sweep(cfg);
    REQUIRE(one.cells.size() == 1);
    CHECK(one.cells[0].paths == 1);
    CHECK(std::isfinite(one.cells[0].mean_df));
    CHECK(std::isnan(one.cells[0].stderr_df));

    cfg.kappas = {2.0, 5.0};
    cfg.hursts = {0.4, 0.7};
    cfg.paths_per_cell = 3;
    cfg.workers = 1;
    const SweepResult serial = dimension_sweep(cfg);
    cfg.workers = 4;
    const SweepResult threaded = dimension_sweep(cfg);
    REQUIRE(serial.cells.size() == 4);
    for (std::size_t c = 0; c < 4; ++c) {
        CHECK(serial.cells[c].slopes == threaded.cells[c].slopes);
        CHECK(serial.cells[c].paths == 3);
        CHECK(std::isfinite(serial.cells[c].stderr_df));
    }
    CHECK(serial.tau_kappa == threaded.tau_kappa);
    CHECK(serial.at(1, 0).kappa == 2.0);
    CHECK(serial.at(1, 0).hurst == 0.7);

    CHECK(sweep_path_seed(5, 2, 1) ==
          derive_seed(derive_seed(5, StreamTag::SweepCell, 2), StreamTag::Ensemble, 1));
    CHECK(sweep_path_seed(5, 2, 1) != sweep_path_seed(5, 1, 2));

    cfg.kappas.clear();
    CHECK_THROWS_AS(dimension_sweep(cfg), ValidationError);
}

TEST_CASE("sweep records failed paths and continues") {
    SweepConfig cfg;
    cfg.kappas = {4.0};
    cfg.hursts = {0.3, 0.7};
    cfg.paths_per_cell = 2;
    cfg.schedule = FidelitySchedule::practical(64, 0.01, 1.0);
    cfg.integrator.floor = 0.05;
    const SweepResult r = dimension_sweep(cfg);
    REQUIRE(r.cells.size() == 2);
    for (const SweepCell& c : r.cells) {
        CHECK(c.paths + c.failures.size() == 2);
        for (const std::string& f : c.failures) CHECK(f.find("singularity floor") != std::string::npos);
    }
    CHECK(r.cells[0].failures.size() + r.cells[1].failures.size() == 4);
    CHECK(std::isnan(r.cells[0].mean_df));
}

TEST_CASE("self-convergence of coupled splitting traces") {
    ConvergenceConfig cfg;
    cfg.kappa = 2.0;
    cfg.min_level = 8;
    cfg.max_level = 13;
    cfg.paths = 20;
    cfg.seed = 3;
    cfg.workers = 4;
    const ConvergenceReport r = convergence_study(cfg);
    REQUIRE(r.levels.size() == 5);
    for (const auto& l : r.levels) {
        MESSAGE("M = " << l.steps << ": median sup " << l.median_sup << ", median L2 " << l.median_l2);
        CHECK(l.median_sup > 0.0);
        for (std::size_t i = 0; i < l.sup.size(); ++i) CHECK(l.l2[i] <= l.sup[i] * (1.0 + 4.0 * kEps));
    }
    CHECK(r.monotone);
    CHECK(r.empirical_order > 0.0);

    cfg.workers = 1;
    const ConvergenceReport serial = convergence_study(cfg);
    for (std::size_t j = 0; j < r.levels.size(); ++j) CHECK(serial.levels[j].sup == r.levels[j].sup);

    cfg.kappa = 0.0;
    const ConvergenceReport exact = convergence_study(cfg);
    CHECK(exact.monotone);
    for (const auto& l : exact.levels) CHECK(l.median_sup <= ConvergenceReport::exact_floor);
}

}  // TEST_SUITE
