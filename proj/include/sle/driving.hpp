#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sle {

/// Strictly increasing time points on [0, T], starting at 0.
class Mesh {
public:
    /// t_k = T * (k / M). Dyadic M and dyadic T give exactly nested meshes.
    static Mesh uniform(double horizon, std::size_t steps);

    /// Validates monotonicity and t[0] == 0; detects uniform spacing.
    explicit Mesh(std::vector<double> t_points);

    std::size_t size() const noexcept { return t_.size(); }
    std::size_t steps() const noexcept { return t_.size() - 1; }
    double horizon() const noexcept { return t_.back(); }
    double operator[](std::size_t k) const { return t_[k]; }
    double gap(std::size_t k) const { return t_[k + 1] - t_[k]; }
    double mesh_size() const;
    bool is_uniform() const noexcept { return uniform_; }
    std::span<const double> times() const noexcept { return t_; }

private:
    Mesh() = default;
    std::vector<double> t_;
    bool uniform_ = false;
};

enum class ProcessKind { StandardBM, NoiseReinforced, Fractional };

std::string to_string(ProcessKind kind);
ProcessKind process_kind_from_string(const std::string& name);

/// Parameterization of a driving force. Only the field matching `kind` is
/// read: `reinforcement` for NoiseReinforced, `hurst` for Fractional.
struct DrivingSpec {
    ProcessKind kind = ProcessKind::StandardBM;
    double kappa = 0.0;
    double reinforcement = 0.0;
    double hurst = 0.5;
    std::uint64_t seed = 0;

    static constexpr double kMinReinforcement = -10.0;

    static DrivingSpec standard(double kappa, std::uint64_t seed);
    static DrivingSpec noise_reinforced(double kappa, double p, std::uint64_t seed);
    static DrivingSpec fractional(double kappa, double hurst, std::uint64_t seed);

    /// Throws ValidationError on kappa < 0, p outside (-10, 1/2), H outside (0, 1).
    void validate() const;

    /// sqrt(kappa) for Brownian kinds, kappa^H for fractional.
    double force_scale() const;
};

/// Raw process samples, or driving-force samples already multiplied by
/// DrivingSpec::force_scale(). Never a mix of the two.
enum class PathUnits { Process, Force };

struct DrivingPath {
    Mesh mesh;
    std::vector<double> values;
    DrivingSpec spec;
    PathUnits units = PathUnits::Process;
    /// Number of dyadic bridge refinements applied since sampling.
    unsigned refinement_level = 0;

    /// Copy scaled to driving-force units (identity when already scaled).
    DrivingPath as_force() const;

    /// values[k+1] - values[k].
    std::vector<double> increments() const;
};

DrivingPath sample_bm(const Mesh& mesh, std::uint64_t seed);

/// Brownian-bridge midpoint refinement by a power-of-two factor. Existing
/// samples are kept bit-for-bit; level l midpoints come from their own stream,
/// so refine(refine(x, 2), 2) == refine(x, 4).
DrivingPath refine_bm(const DrivingPath& path, unsigned factor);

/// Exact fractional Brownian motion on a uniform mesh (Hosking recursion on
/// fractional Gaussian noise), Cov = (s^2H + t^2H - |t-s|^2H) / 2.
DrivingPath sample_fbm(const Mesh& mesh, double hurst, std::uint64_t seed);

/// Noise-reinforced BM via (1-2p)^(-1/2) t^p B(t^(1-2p)).
DrivingPath sample_nrbm_exact(const Mesh& mesh, double p, std::uint64_t seed);

/// Euler-Maruyama for dB^p = (p/t) B^p dt + dB on a uniform mesh. The first
/// grid value comes from the exact law; p = 0 reproduces sample_bm bitwise.
DrivingPath sample_nrbm_sde(const Mesh& mesh, double p, std::uint64_t seed);

/// Sampler dispatch on spec.kind (exact sampler for noise reinforcement).
DrivingPath sample_driving(const Mesh& mesh, const DrivingSpec& spec);

/// p-th power interpolation with r sub-points per cell:
/// x(t) = ((t - t_k)/h_k)^p (x_{k+1} - x_k) + x_k.
DrivingPath power_interpolate(const DrivingPath& path, double exponent, unsigned factor);

/// Mesh-point covariance of fBM with the 1/2 normalization.
double fbm_covariance(double s, double t, double hurst);

/// (1-2p)^-1 min^(1-p) max^p.
double nrbm_covariance(double s, double t, double p);

}  // namespace sle
