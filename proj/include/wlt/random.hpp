#pragma once

// Counter-based random streams: draw j of stream (seed, i) is a pure
// function of (seed, i, j), so paths can be generated in any order.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wlt {

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class CounterStream {
public:
    constexpr CounterStream(std::uint64_t seed, std::uint64_t index) noexcept
        : key_(mix64(seed ^ mix64(index * golden_gamma + 0x2545F4914F6CDD1DULL))) {}

    [[nodiscard]] constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
        return mix64(key_ + (counter + 1) * golden_gamma);
    }

    constexpr std::uint64_t next_u64() noexcept { return at(counter_++); }

    /// Uniform on (0, 1], 53 bits.
    double next_uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Two independent standard normals (Box-Muller).
    void next_normal_pair(double& z0, double& z1) noexcept {
        const double r = std::sqrt(-2.0 * std::log(next_uniform()));
        const double theta = 2.0 * std::numbers::pi * next_uniform();
        z0 = r * std::cos(theta);
        z1 = r * std::sin(theta);
    }

    double next_normal() noexcept {
        double a;
        double b;
        next_normal_pair(a, b);
        return a;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace wlt
