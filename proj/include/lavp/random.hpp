#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lavp {

/// Every stochastic routine takes its generator explicitly so runs are seed-reproducible.
using Rng = std::mt19937_64;

/// Independent 64-bit seed for sub-stream `stream` of `seed` (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Index drawn from unnormalized non-negative weights (roulette wheel).
template <typename Weights>
std::size_t roulette(const Weights& weights, double total, Rng& rng) {
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive; // rounding left target == total
}

} // namespace lavp
