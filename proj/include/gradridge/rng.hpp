#pragma once

#include <cmath>
#include <cstdint>

namespace gradridge {

/// Counter-based pseudo-random generator: the splitmix64 output function
/// evaluated at seed + counter. Stateless, so independent streams can be
/// drawn in parallel from disjoint counter ranges. The algorithm name is
/// recorded in model metadata as "splitmix64-counter-v1"; changing the
/// mixing constants requires bumping that tag.
struct CounterRng {
    std::uint64_t seed = 0;

    static constexpr const char* algorithm = "splitmix64-counter-v1";

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0,1).
    double uniform01(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on [-1,1).
    double uniform_sym(std::uint64_t counter) const {
        return 2.0 * uniform01(counter) - 1.0;
    }

    /// Standard normal via Box-Muller; consumes counters c and c+1.
    double normal(std::uint64_t counter) const {
        const double u1 = uniform01(counter);
        const double u2 = uniform01(counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
};

/// Deterministically derives an independent seed from (seed, tag) pairs,
/// e.g. per cross-validation fold.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return CounterRng{seed}.bits(0x5EED0000u + tag);
}

}  // namespace gradridge
