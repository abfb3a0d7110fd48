#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sle/analysis.hpp"
#include "sle/driving.hpp"
#include "sle/error.hpp"
#include "sle/reference.hpp"
#include "sle/rng.hpp"
#include "sle/splitting.hpp"
#include "support.hpp"

using namespace sle;
using sle::test::Draw;
using sle::test::kEps;

namespace {

DrivingPath constant_path(double horizon, std::size_t steps, double value) {
    const Mesh mesh = Mesh::uniform(horizon, steps);
    return DrivingPath{mesh, std::vector<double>(mesh.size(), value), DrivingSpec::standard(0.0, 0)};
}

// Explicit Euler for the reverse drift z' = -2/z.
Complex euler_drift(Complex z, double duration, std::size_t n) {
    const double dt = duration / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) z -= 2.0 * dt / z;
    return z;
}

Complex richardson_drift(Complex z, double duration, std::size_t n) {
    return 2.0 * euler_drift(z, duration, 2 * n) - euler_drift(z, duration, n);
}

// Forward Loewner ODE with lambda(t) = rate * t by explicit Euler.
Complex euler_forward_linear(Complex g, double horizon, double rate, std::size_t n) {
    const double dt = horizon / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) g += dt * 2.0 / (g - rate * dt * static_cast<double>(i));
    return g;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE("reference") {

TEST_CASE("Euler single step by hand") {
    const Mesh mesh = Mesh::uniform(0.1, 1);
    DrivingPath p{mesh, {0.0, 0.0}, DrivingSpec::standard(4.0, 0)};
    const Trace t = euler_reverse(Complex(0.0, 1.0), p, 4.0);
    CHECK(t.points[1].real() == 0.0);
    CHECK(t.points[1].imag() == doctest::Approx(1.2).epsilon(1e-15));

    p.values = {0.0, 0.25};
    CHECK(euler_reverse(Complex(0.0, 1.0), p, 4.0).points[1].real() == doctest::Approx(0.5));
    p.units = PathUnits::Force;
    CHECK(euler_reverse(Complex(0.0, 1.0), p, 4.0).points[1].real() == doctest::Approx(0.25));
}

TEST_CASE("Euler converges to the drift flow for kappa = 0") {
    const Trace t = euler_reverse(Complex(0.0, 1.0), constant_path(1.0, 1u << 16, 0.0), 0.0);
    CHECK(std::abs(t.points.back() - Complex(0.0, std::sqrt(5.0))) <= 1e-3);
}

TEST_CASE("Euler rejects bad input and reports the failing step") {
    DrivingPath p = constant_path(1.0, 8, 0.0);
    CHECK_THROWS_AS(euler_reverse(Complex(0.0, 0.0), p, 1.0), ValidationError);
    CHECK_THROWS_AS(euler_reverse(Complex(0.0, 1.0), p, -1.0), ValidationError);
    // Real noise can only raise Im, so only a non-finite state trips the guard.
    p.values[5] = std::nan("");
    try {
        euler_reverse(Complex(0.0, 1.0), p, 1.0);
        FAIL("expected a numeric error");
    } catch (const NumericError& e) {
        REQUIRE(e.step().has_value());
        CHECK(*e.step() == 4);
    }
}

TEST_CASE("coupled splitting and Euler paths agree on a fine mesh") {
    const std::size_t M = 1u << 16;
    std::vector<double> sups;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const DrivingPath path = sample_driving(Mesh::uniform(1.0, M), DrivingSpec::standard(2.0, path_seed(40, i)));
        const Trace split = run_splitting(Complex(0.0, 0.1), path.as_force(), Variant::Standard);
        const Trace euler = euler_reverse(Complex(0.0, 0.1), path, 2.0);
        sups.push_back(sup_distance(split, euler, Alignment::CommonTimes));
    }
    const double med = median(sups);
    MESSAGE("median sup distance " << med);
    CHECK(med <= 1e-2);
}

TEST_CASE("piecewise driving validation") {
    PiecewiseConstantDriving d{{0.0, 0.5, 1.0}, {1.0, 2.0}};
    CHECK_NOTHROW(d.validate());
    CHECK(d.level_at(0.0) == 1.0);
    CHECK(d.level_at(0.49) == 1.0);
    CHECK(d.level_at(0.5) == 2.0);
    CHECK(d.level_at(1.0) == 2.0);
    CHECK_THROWS_AS((PiecewiseConstantDriving{{0.0}, {}}.validate()), ValidationError);
    CHECK_THROWS_AS((PiecewiseConstantDriving{{0.0, 1.0}, {1.0, 2.0}}.validate()), ValidationError);
    CHECK_THROWS_AS((PiecewiseConstantDriving{{0.0, 1.0, 1.0}, {1.0, 2.0}}.validate()), ValidationError);
    CHECK_THROWS_AS(exact_piecewise_trace(Complex(1.0, 0.0), d), ValidationError);
}

TEST_CASE("exact composition on one interval is a slit map") {
    const PiecewiseConstantDriving d{{0.0, 0.7}, {0.0}};
    const Trace t = exact_piecewise_trace(Complex(0.3, 0.4), d);
    REQUIRE(t.size() == 2);
    CHECK(t.points[1] == slit_reverse(Complex(0.3, 0.4), 0.0, 0.7));
}

TEST_CASE("exact composition on two intervals against an Euler oracle") {
    const double a = 0.8;
    const PiecewiseConstantDriving d{{0.0, 0.3, 0.7}, {0.0, a}};
    const Complex z0(0.1, 0.5);
    const std::vector<double> samples{0.15, 0.5};
    const Trace t = exact_piecewise_trace(z0, d, samples);
    REQUIRE(t.times == std::vector<double>{0.0, 0.15, 0.3, 0.5, 0.7});

    const Complex at_break = richardson_drift(z0, 0.3, 200'000) - a;
    const Complex at_end = richardson_drift(at_break, 0.4, 200'000);
    CHECK(std::abs(t.points[1] - richardson_drift(z0, 0.15, 200'000)) <= 1e-4);
    CHECK(std::abs(t.points[2] - at_break) <= 1e-4);
    CHECK(std::abs(t.points[4] - at_end) <= 1e-4);
}

TEST_CASE("one splitting step is two slit maps around a translation") {
    Draw draw(41);
    double worst = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const Complex z = draw.upper(3.0, 0.01, 3.0);
        const double h = std::pow(10.0, draw.uniform(-6.0, -0.5));
        const double kappa = draw.uniform(0.0, 8.0);
        const double dB = draw.normal() * std::sqrt(h);
        const Complex step = sle_step(z, h, dB, kappa);
        const Complex composed =
            slit_reverse(slit_reverse(z, 0.0, 0.5 * h) + std::sqrt(kappa) * dB, 0.0, 0.5 * h);
        const double scale = std::abs(z) + std::abs(step) + 2.0 * h / std::abs(step) + 2.0 * h / std::abs(z);
        worst = std::max(worst, std::abs(step - composed) / scale);
    }
    CHECK(worst <= 8.0 * kEps);
}

TEST_CASE("splitting legs") {
    const Mesh mesh({0.0, 0.2, 0.5, 1.0});
    DrivingPath force{mesh, {0.0, 0.3, -0.1, 0.4}, DrivingSpec::standard(1.0, 0)};
    CHECK_THROWS_AS(splitting_legs(force), ValidationError);
    force.units = PathUnits::Force;
    const PiecewiseConstantDriving legs = splitting_legs(force);
    CHECK(legs.breakpoints == std::vector<double>{0.0, 0.1, 0.35, 0.75, 1.0});
    CHECK(legs.levels == std::vector<double>{-0.0, -0.3, 0.1, -0.4});
}

TEST_CASE("splitting trace equals the exact composition on its own legs") {
    for (double kappa : {0.0, 2.0, 6.0}) {
        const Mesh mesh = Mesh::uniform(1.0, 4096);
        const DrivingPath force = sample_driving(mesh, DrivingSpec::standard(kappa, 42)).as_force();
        const Trace split = run_splitting(Complex(0.0, 0.05), force, Variant::Standard);
        const Trace exact = exact_piecewise_trace(Complex(0.0, 0.05), splitting_legs(force), mesh.times());
        REQUIRE(exact.size() == 2 * mesh.size() - 1);
        double worst = 0.0;
        for (std::size_t k = 0; k < mesh.size(); ++k) {
            REQUIRE(exact.times[2 * k] == mesh[k]);
            const double err = std::abs(exact.points[2 * k] - split.points[k]);
            worst = std::max(worst, err / std::abs(split.points[k]));
        }
        MESSAGE("kappa " << kappa << ": worst relative gap " << worst / kEps << " ulp");
        CHECK(worst <= 8.0 * kEps);
    }
}

TEST_CASE("Euler oracle approaches the splitting trace under refinement") {
    std::vector<double> medians;
    for (unsigned level = 8; level <= 14; level += 2) {
        std::vector<double> sups;
        for (std::uint64_t i = 0; i < 20; ++i) {
            const DrivingPath coarse = sample_driving(Mesh::uniform(1.0, 1u << 8), DrivingSpec::standard(2.0, path_seed(43, i)));
            const DrivingPath path = refine_bm(coarse, 1u << (level - 8));
            const Trace split = run_splitting(Complex(0.0, 0.1), path.as_force(), Variant::Standard);
            const Trace euler = euler_reverse(Complex(0.0, 0.1), path, 2.0);
            sups.push_back(sup_distance(split, euler, Alignment::CommonTimes));
        }
        medians.push_back(median(sups));
        MESSAGE("level " << level << ": median sup " << medians.back());
    }
    for (std::size_t j = 1; j < medians.size(); ++j) CHECK(medians[j] < medians[j - 1]);
}

TEST_CASE("forward point under constant driving") {
    // From i under zero driving g_t(i)^2 = 4t - 1, so i is swallowed at t = 1/4.
    try {
        forward_point(Complex(0.0, 1.0), constant_path(1.0, 1, 0.0));
        FAIL("expected swallowing");
    } catch (const SwallowedError& e) {
        CHECK(e.time() == doctest::Approx(0.25).epsilon(1e-6));
    }
    const Complex a = forward_point(Complex(1.0, 1.0), constant_path(1.0, 4, 0.0));
    CHECK(std::abs(a - sqrt_h(Complex(4.0, 2.0))) <= 1e-8);
    const Complex b = forward_point(Complex(3.0, 1.0), constant_path(1.0, 4, 2.0));
    CHECK(std::abs(b - (2.0 + sqrt_h(Complex(4.0, 2.0)))) <= 1e-8);
    const Complex c = forward_point(Complex(0.5, 2.0), constant_path(0.75, 3, 0.0));
    CHECK(std::abs(c - sqrt_h(square(Complex(0.5, 2.0)) + 3.0)) <= 1e-8);
    CHECK_THROWS_AS(forward_point(Complex(1.0, 0.0), constant_path(1.0, 1, 0.0)), ValidationError);
}

TEST_CASE("forward point under linear driving against an Euler oracle") {
    DrivingPath p{Mesh::uniform(0.5, 1), {0.0, 0.5}, DrivingSpec::standard(0.0, 0)};
    const Complex g = forward_point(Complex(0.0, 1.0), p);
    const Complex oracle = 2.0 * euler_forward_linear(Complex(0.0, 1.0), 0.5, 1.0, 2'000'000) -
                           euler_forward_linear(Complex(0.0, 1.0), 0.5, 1.0, 1'000'000);
    CHECK(std::abs(g - oracle) <= 1e-6);
}

TEST_CASE("power-interpolated driving converges under refinement") {
    const unsigned fine_level = 12;
    const DrivingPath fine = refine_bm(
        sample_driving(Mesh::uniform(1.0, 1u << 4), DrivingSpec::standard(2.0, 44)), 1u << (fine_level - 4));
    const std::vector<Complex> probes{{-1.0, 1.0}, {0.0, 1.5}, {1.0, 1.0}, {0.5, 2.0}};
    std::vector<Complex> target;
    for (const Complex& z : probes) target.push_back(forward_point(z, fine));

    for (double p : {0.5, 1.0, 2.0}) {
        std::vector<double> sups;
        for (unsigned level = 4; level <= 10; level += 2) {
            const std::size_t stride = std::size_t{1} << (fine_level - level);
            const Mesh coarse_mesh = Mesh::uniform(1.0, std::size_t{1} << level);
            std::vector<double> values;
            for (std::size_t k = 0; k < coarse_mesh.size(); ++k) values.push_back(fine.values[k * stride]);
            const DrivingPath coarse{coarse_mesh, values, fine.spec};
            const DrivingPath interp = power_interpolate(coarse, p, static_cast<unsigned>(stride));
            double sup = 0.0;
            for (std::size_t j = 0; j < probes.size(); ++j)
                sup = std::max(sup, std::abs(forward_point(probes[j], interp) - target[j]));
            sups.push_back(sup);
        }
        for (std::size_t j = 1; j < sups.size(); ++j)
            CHECK_MESSAGE(sups[j] < sups[j - 1], "p = " << p << " level " << 4 + 2 * j << ": " << sups[j]);
    }
}

}  // TEST_SUITE
