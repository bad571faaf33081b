#pragma once

#include <cstdint>

namespace flapdesign {

/// SplitMix64. Small, fully specified, and identical on every platform, so a
/// (config, seed) pair names the same level everywhere.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [lo, hi] by reduction modulo the range width.
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        const auto width = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
        return static_cast<int>(lo + static_cast<std::int64_t>(next() % width));
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool operator==(const SplitMix64&) const = default;
};

/// Stateless mix of two words; used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g{a ^ (b * 0xD1B54A32D192ED03ull)};
    g.next();
    return g.next();
}

}  // namespace flapdesign
