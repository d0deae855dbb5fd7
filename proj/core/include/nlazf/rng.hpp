#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace nlazf {

/// SplitMix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Counter-derived seed for substream `index` of `master`. Realization r of a
/// sweep always uses substream_seed(master, r), so results do not depend on
/// which thread runs it.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

/// Seeded random source. The mapping from engine output to doubles is spelled
/// out here rather than delegated to std distributions, so that identical
/// seeds give identical streams on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Circularly-symmetric complex Gaussian CN(0,1): real and imaginary parts
    /// independent N(0, 1/2). Polar Box-Muller, one draw per call.
    std::complex<double> standard_complex_normal() {
        const double r = std::sqrt(-std::log(uniform01_open_low()));
        const double theta = 2.0 * std::numbers::pi * uniform01();
        return {r * std::cos(theta), r * std::sin(theta)};
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace nlazf
