#include "sle/moments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "sle/error.hpp"
#include "sle/parallel.hpp"
#include "sle/rng.hpp"
#include "sle/splitting.hpp"

namespace sle {

double second_moment_closed_form(double kappa, double y0, double t) { return -y0 * y0 + (kappa - 4.0) * t; }

double fourth_moment_closed_form(double kappa, double y0, double t) {
    const double y2 = y0 * y0;
    return y2 * y2 + (6.0 * kappa - 8.0) * (-y2 * t + 0.5 * (kappa - 4.0) * t * t);
}

GaussHermite GaussHermite::make(std::size_t n) {
    if (n < 1) throw ValidationError("Gauss-Hermite rule needs at least one node");
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussHermite rule;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        rule.nodes.push_back(solver.eigenvalues()(i));
        const double v = solver.eigenvectors()(0, i);
        rule.weights.push_back(v * v);
    }
    return rule;
}

namespace {

void finish_row(MomentRow& row, MomentReport& report) {
    row.deviation_m2 = std::abs(row.m2 - row.expected_m2);
    row.deviation_m4 = std::abs(row.m4 - row.expected_m4);
    report.max_deviation_m2 = std::max(report.max_deviation_m2, row.deviation_m2);
    report.max_deviation_m4 = std::max(report.max_deviation_m4, row.deviation_m4);
}

}  // namespace

MomentReport quadrature_moments(double kappa, double y0, double horizon, std::size_t steps, std::size_t nodes) {
    const FidelitySchedule schedule = FidelitySchedule::practical(steps, y0, horizon);
    if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
    const Mesh mesh = schedule.mesh();
    const GaussHermite rule = GaussHermite::make(nodes);

    MomentReport report;
    report.kappa = kappa;
    report.y0 = y0;
    report.horizon = horizon;
    report.steps = steps;

    Complex m2 = square(Complex(0.0, y0));
    Complex m4 = square(m2);
    for (std::size_t k = 0; k <= steps; ++k) {
        MomentRow row;
        row.t = mesh[k];
        row.expected_m2 = second_moment_closed_form(kappa, y0, row.t);
        row.expected_m4 = fourth_moment_closed_form(kappa, y0, row.t);
        row.m2 = m2;
        row.m4 = m4;
        finish_row(row, report);
        report.rows.push_back(row);
        if (k == steps) break;

        // Conditional moments of the step map at two probe states of the step's natural scale.
        const double h = mesh.gap(k);
        const double root_h = std::sqrt(h);
        auto conditional = [&](Complex z) {
            Complex q2 = 0.0;
            Complex q4 = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const Complex z2 = square(sle_step(z, h, root_h * rule.nodes[i], kappa));
                q2 += rule.weights[i] * z2;
                q4 += rule.weights[i] * square(z2);
            }
            return std::pair{q2, q4};
        };
        const Complex za = root_h * Complex(0.3, 1.1);
        const Complex zb = root_h * Complex(-0.7, 2.3);
        const auto [qa2, qa4] = conditional(za);
        const auto [qb2, qb4] = conditional(zb);
        const Complex za2 = square(za);
        const Complex zb2 = square(zb);
        const Complex shift2 = 0.5 * ((qa2 - za2) + (qb2 - zb2));
        const Complex da = qa4 - square(za2);
        const Complex db = qb4 - square(zb2);
        const Complex coupling = (da - db) / (za2 - zb2);
        const Complex constant = da - coupling * za2;

        m4 = m4 + coupling * m2 + constant;
        m2 = m2 + shift2;
    }
    return report;
}

namespace {

struct MomentSums {
    std::vector<Complex> m2, m4;
    std::vector<Complex> sq2, sq4;  // sums of (Re^2, Im^2) packed as complex

    explicit MomentSums(std::size_t n) : m2(n), m4(n), sq2(n), sq4(n) {}

    void add(const MomentSums& o) {
        for (std::size_t k = 0; k < m2.size(); ++k) {
            m2[k] += o.m2[k];
            m4[k] += o.m4[k];
            sq2[k] += o.sq2[k];
            sq4[k] += o.sq4[k];
        }
    }
};

Complex componentwise_square(Complex z) { return {z.real() * z.real(), z.imag() * z.imag()}; }

}  // namespace

MomentReport ensemble_moments(double kappa, double y0, double horizon, std::size_t steps, std::size_t paths,
                              std::uint64_t master_seed, unsigned workers) {
    const FidelitySchedule schedule = FidelitySchedule::practical(steps, y0, horizon);
    if (paths < 2) throw ValidationError("ensemble moments need at least 2 paths");

    // Fixed block partition, summed in block order, so the worker count cannot change the result.
    constexpr std::size_t kBlocks = 64;
    const std::size_t blocks = std::min(kBlocks, paths);
    std::vector<MomentSums> partial(blocks, MomentSums(steps + 1));
    parallel_for(blocks, workers, [&](std::size_t b) {
        MomentSums& sums = partial[b];
        for (std::size_t i = b; i < paths; i += blocks) {
            const Trace trace = simulate_sle(DrivingSpec::standard(kappa, path_seed(master_seed, i)), schedule);
            for (std::size_t k = 0; k <= steps; ++k) {
                const Complex z2 = square(trace.points[k]);
                const Complex z4 = square(z2);
                sums.m2[k] += z2;
                sums.m4[k] += z4;
                sums.sq2[k] += componentwise_square(z2);
                sums.sq4[k] += componentwise_square(z4);
            }
        }
    });
    MomentSums total(steps + 1);
    for (const MomentSums& s : partial) total.add(s);

    MomentReport report;
    report.kappa = kappa;
    report.y0 = y0;
    report.horizon = horizon;
    report.steps = steps;
    report.paths = paths;
    const Mesh mesh = schedule.mesh();
    const double n = static_cast<double>(paths);
    auto standard_error = [n](Complex sum, Complex sum_sq) {
        const Complex mean = sum / n;
        const double vr = std::max(0.0, (sum_sq.real() - n * mean.real() * mean.real()) / (n - 1.0));
        const double vi = std::max(0.0, (sum_sq.imag() - n * mean.imag() * mean.imag()) / (n - 1.0));
        return Complex(std::sqrt(vr / n), std::sqrt(vi / n));
    };
    for (std::size_t k = 0; k <= steps; ++k) {
        MomentRow row;
        row.t = mesh[k];
        row.expected_m2 = second_moment_closed_form(kappa, y0, row.t);
        row.expected_m4 = fourth_moment_closed_form(kappa, y0, row.t);
        row.m2 = total.m2[k] / n;
        row.m4 = total.m4[k] / n;
        row.stderr_m2 = standard_error(total.m2[k], total.sq2[k]);
        row.stderr_m4 = standard_error(total.m4[k], total.sq4[k]);
        finish_row(row, report);
        report.rows.push_back(row);
    }
    return report;
}

std::vector<std::size_t> ensemble_breaches(const MomentReport& report, double z) {
    auto outside = [z](double deviation, double se) {
        // Zero spread (t = 0) leaves only rounding; demand near-equality there.
        return se > 0.0 ? std::abs(deviation) > z * se : std::abs(deviation) > 1e-12;
    };
    std::vector<std::size_t> breaches;
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        const MomentRow& r = report.rows[k];
        if (outside(r.m2.real() - r.expected_m2, r.stderr_m2.real()) || outside(r.m2.imag(), r.stderr_m2.imag()) ||
            outside(r.m4.real() - r.expected_m4, r.stderr_m4.real()) || outside(r.m4.imag(), r.stderr_m4.imag()))
            breaches.push_back(k);
    }
    return breaches;
}

}  // namespace sle
