#pragma once

#include <cstdint>
#include <random>

namespace sle {

/// Stream purposes. Mixed into derived seeds so that samplers sharing a master
/// seed never read the same random numbers by accident.
enum class StreamTag : std::uint64_t {
    Brownian = 0x42,
    BridgeRefine = 0x52,
    Fractional = 0x46,
    Ensemble = 0x45,
    SweepCell = 0x43,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `index` of purpose `tag` under `master`. A pure function,
/// so per-path streams do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t index = 0) noexcept;

/// Seed of path `index` in an ensemble run from a master seed.
inline std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return derive_seed(master, StreamTag::Ensemble, index);
}

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sle
