#include "sle/driving.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sle/error.hpp"
#include "sle/rng.hpp"

namespace sle {

Mesh Mesh::uniform(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("time horizon must be positive");
    if (steps < 1) throw ValidationError("step count must be at least 1");
    Mesh mesh;
    mesh.t_.resize(steps + 1);
    const double m = static_cast<double>(steps);
    for (std::size_t k = 0; k <= steps; ++k) mesh.t_[k] = horizon * (static_cast<double>(k) / m);
    mesh.uniform_ = true;
    return mesh;
}

Mesh::Mesh(std::vector<double> t_points) : t_(std::move(t_points)) {
    if (t_.empty()) throw ValidationError("mesh needs at least one time point");
    if (t_.front() != 0.0) throw ValidationError("mesh must start at t = 0");
    for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
        if (!(t_[k + 1] > t_[k]) || !std::isfinite(t_[k + 1]))
            throw ValidationError("mesh times must be finite and strictly increasing");
    }
    uniform_ = true;
    if (t_.size() > 2) {
        const double h = horizon() / static_cast<double>(steps());
        for (std::size_t k = 0; k < steps() && uniform_; ++k)
            uniform_ = std::abs(gap(k) - h) <= 1e-9 * h;
    }
}

double Mesh::mesh_size() const {
    double largest = 0.0;
    for (std::size_t k = 0; k + 1 < t_.size(); ++k) largest = std::max(largest, gap(k));
    return largest;
}

std::string to_string(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::StandardBM: return "standard";
        case ProcessKind::NoiseReinforced: return "noise_reinforced";
        case ProcessKind::Fractional: return "fractional";
    }
    return "unknown";
}

ProcessKind process_kind_from_string(const std::string& name) {
    if (name == "standard" || name == "bm" || name == "sle") return ProcessKind::StandardBM;
    if (name == "noise_reinforced" || name == "nrbm" || name == "nrsle") return ProcessKind::NoiseReinforced;
    if (name == "fractional" || name == "fbm" || name == "fsle") return ProcessKind::Fractional;
    throw ValidationError("unknown process kind '" + name + "'");
}

DrivingSpec DrivingSpec::standard(double kappa, std::uint64_t seed) {
    DrivingSpec spec;
    spec.kappa = kappa;
    spec.seed = seed;
    return spec;
}

DrivingSpec DrivingSpec::noise_reinforced(double kappa, double p, std::uint64_t seed) {
    DrivingSpec spec = standard(kappa, seed);
    spec.kind = ProcessKind::NoiseReinforced;
    spec.reinforcement = p;
    return spec;
}

DrivingSpec DrivingSpec::fractional(double kappa, double hurst, std::uint64_t seed) {
    DrivingSpec spec = standard(kappa, seed);
    spec.kind = ProcessKind::Fractional;
    spec.hurst = hurst;
    return spec;
}

namespace {

void check_reinforcement(double p) {
    if (!(p < 0.5)) throw ValidationError("reinforcement strength must be < 1/2");
    if (!(p > DrivingSpec::kMinReinforcement)) throw ValidationError("reinforcement strength must be > -10");
}

void check_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ValidationError("Hurst exponent must lie in (0, 1)");
}

void check_uniform(const Mesh& mesh, const char* who) {
    if (!mesh.is_uniform()) throw ValidationError(std::string(who) + " requires a uniform mesh");
}

}  // namespace

void DrivingSpec::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ValidationError("kappa must be finite and >= 0");
    if (kind == ProcessKind::NoiseReinforced) check_reinforcement(reinforcement);
    if (kind == ProcessKind::Fractional) check_hurst(hurst);
}

double DrivingSpec::force_scale() const {
    return kind == ProcessKind::Fractional ? std::pow(kappa, hurst) : std::sqrt(kappa);
}

DrivingPath DrivingPath::as_force() const {
    if (units == PathUnits::Force) return *this;
    DrivingPath out = *this;
    const double scale = spec.force_scale();
    for (double& v : out.values) v *= scale;
    out.units = PathUnits::Force;
    return out;
}

std::vector<double> DrivingPath::increments() const {
    std::vector<double> d(values.size() > 0 ? values.size() - 1 : 0);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = values[k + 1] - values[k];
    return d;
}

DrivingPath sample_bm(const Mesh& mesh, std::uint64_t seed) {
    GaussianStream normal(derive_seed(seed, StreamTag::Brownian));
    std::vector<double> values(mesh.size(), 0.0);
    for (std::size_t k = 0; k < mesh.steps(); ++k)
        values[k + 1] = values[k] + std::sqrt(mesh.gap(k)) * normal();
    return {mesh, std::move(values), DrivingSpec::standard(0.0, seed)};
}

DrivingPath refine_bm(const DrivingPath& path, unsigned factor) {
    if (factor == 0 || !std::has_single_bit(factor))
        throw ValidationError("refinement factor must be a power of two");
    if (path.spec.kind != ProcessKind::StandardBM)
        throw ValidationError("bridge refinement applies to standard Brownian paths only");
    check_uniform(path.mesh, "refine_bm");
    if (path.mesh.size() < 2) throw ValidationError("refine_bm needs at least one mesh cell");

    const double scale = path.units == PathUnits::Force ? path.spec.force_scale() : 1.0;
    DrivingPath out = path;
    for (unsigned level = 1; level < factor; level *= 2) {
        const std::size_t cells = out.mesh.steps();
        Mesh fine = Mesh::uniform(out.mesh.horizon(), 2 * cells);
        ++out.refinement_level;
        GaussianStream normal(derive_seed(path.spec.seed, StreamTag::BridgeRefine, out.refinement_level));
        std::vector<double> values(fine.size());
        for (std::size_t j = 0; j < cells; ++j) {
            const double a = out.values[j];
            const double b = out.values[j + 1];
            values[2 * j] = a;
            values[2 * j + 1] = 0.5 * (a + b) + scale * std::sqrt(0.25 * out.mesh.gap(j)) * normal();
        }
        values[2 * cells] = out.values[cells];
        out.mesh = std::move(fine);
        out.values = std::move(values);
    }
    return out;
}

DrivingPath sample_fbm(const Mesh& mesh, double hurst, std::uint64_t seed) {
    check_hurst(hurst);
    check_uniform(mesh, "sample_fbm");
    DrivingPath out{mesh, std::vector<double>(mesh.size(), 0.0), DrivingSpec::fractional(0.0, hurst, seed)};
    const std::size_t n = mesh.steps();
    if (n == 0) return out;

    // Unit-lag autocovariance of fractional Gaussian noise.
    const double two_h = 2.0 * hurst;
    std::vector<double> gamma(n);
    gamma[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        gamma[k] = 0.5 * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) + std::pow(kk - 1.0, two_h));
    }

    GaussianStream normal(derive_seed(seed, StreamTag::Fractional));
    std::vector<double> noise(n);
    std::vector<double> phi(n, 0.0);
    std::vector<double> previous(n, 0.0);
    double variance = 1.0;
    noise[0] = normal();
    for (std::size_t i = 1; i < n; ++i) {
        double acc = gamma[i];
        for (std::size_t j = 1; j < i; ++j) acc -= previous[j] * gamma[i - j];
        const double reflection = acc / variance;
        for (std::size_t j = 1; j < i; ++j) phi[j] = previous[j] - reflection * previous[i - j];
        phi[i] = reflection;
        variance *= 1.0 - reflection * reflection;
        if (!(variance > 0.0) || !std::isfinite(variance))
            throw NumericError("fractional noise covariance is not positive definite at this mesh size "
                               "(Hurst exponent too close to 1?)", i);
        double mean = 0.0;
        for (std::size_t j = 1; j <= i; ++j) mean += phi[j] * noise[i - j];
        noise[i] = mean + std::sqrt(variance) * normal();
        std::copy(phi.begin() + 1, phi.begin() + static_cast<std::ptrdiff_t>(i) + 1, previous.begin() + 1);
    }

    const double step_scale = std::pow(mesh.gap(0), hurst);
    for (std::size_t k = 0; k < n; ++k) out.values[k + 1] = out.values[k] + step_scale * noise[k];
    return out;
}

DrivingPath sample_nrbm_exact(const Mesh& mesh, double p, std::uint64_t seed) {
    check_reinforcement(p);
    GaussianStream normal(derive_seed(seed, StreamTag::Brownian));
    const double warp = 1.0 - 2.0 * p;
    const double amplitude = 1.0 / std::sqrt(warp);
    std::vector<double> values(mesh.size(), 0.0);
    double brownian = 0.0;
    double previous_warped = 0.0;
    for (std::size_t k = 1; k < mesh.size(); ++k) {
        const double warped = std::pow(mesh[k], warp);
        if (!std::isfinite(warped)) throw NumericError("time warp t^(1-2p) overflowed", k);
        brownian = brownian + std::sqrt(warped - previous_warped) * normal();
        previous_warped = warped;
        values[k] = amplitude * std::pow(mesh[k], p) * brownian;
    }
    return {mesh, std::move(values), DrivingSpec::noise_reinforced(0.0, p, seed)};
}

DrivingPath sample_nrbm_sde(const Mesh& mesh, double p, std::uint64_t seed) {
    check_reinforcement(p);
    check_uniform(mesh, "sample_nrbm_sde");
    GaussianStream normal(derive_seed(seed, StreamTag::Brownian));
    std::vector<double> values(mesh.size(), 0.0);
    if (mesh.size() > 1) {
        // Same arithmetic as the exact sampler's first point; the 1/t drift is undefined at t = 0.
        const double warp = 1.0 - 2.0 * p;
        const double first = 0.0 + std::sqrt(std::pow(mesh[1], warp) - 0.0) * normal();
        values[1] = (1.0 / std::sqrt(warp)) * std::pow(mesh[1], p) * first;
    }
    for (std::size_t k = 1; k + 1 < mesh.size(); ++k) {
        const double h = mesh.gap(k);
        values[k + 1] = values[k] + p / mesh[k] * values[k] * h + std::sqrt(h) * normal();
    }
    return {mesh, std::move(values), DrivingSpec::noise_reinforced(0.0, p, seed)};
}

DrivingPath sample_driving(const Mesh& mesh, const DrivingSpec& spec) {
    spec.validate();
    DrivingPath path = [&] {
        switch (spec.kind) {
            case ProcessKind::NoiseReinforced: return sample_nrbm_exact(mesh, spec.reinforcement, spec.seed);
            case ProcessKind::Fractional: return sample_fbm(mesh, spec.hurst, spec.seed);
            case ProcessKind::StandardBM: break;
        }
        return sample_bm(mesh, spec.seed);
    }();
    path.spec = spec;
    return path;
}

DrivingPath power_interpolate(const DrivingPath& path, double exponent, unsigned factor) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) throw ValidationError("interpolation exponent must be > 0");
    if (factor < 1) throw ValidationError("interpolation factor must be >= 1");
    check_uniform(path.mesh, "power_interpolate");
    if (factor == 1) return path;

    const std::size_t cells = path.mesh.steps();
    DrivingPath out = path;
    out.mesh = Mesh::uniform(path.mesh.horizon(), cells * factor);
    out.values.assign(out.mesh.size(), 0.0);
    const double r = static_cast<double>(factor);
    for (std::size_t k = 0; k < cells; ++k) {
        const double base = path.values[k];
        const double jump = path.values[k + 1] - base;
        out.values[k * factor] = base;
        for (unsigned j = 1; j < factor; ++j)
            out.values[k * factor + j] = std::pow(static_cast<double>(j) / r, exponent) * jump + base;
    }
    out.values.back() = path.values.back();
    return out;
}

double fbm_covariance(double s, double t, double hurst) {
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(s), two_h) + std::pow(std::abs(t), two_h) - std::pow(std::abs(t - s), two_h));
}

double nrbm_covariance(double s, double t, double p) {
    const double lo = std::min(s, t);
    const double hi = std::max(s, t);
    if (lo <= 0.0) return 0.0;
    return std::pow(lo, 1.0 - p) * std::pow(hi, p) / (1.0 - 2.0 * p);
}

}  // namespace sle
