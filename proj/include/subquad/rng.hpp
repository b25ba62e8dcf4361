#pragma once

// Seeded randomness with bit-identical output across platforms.
// std::mt19937_64 output is fixed by the standard; the distributions in
// <random> are not, so bounded draws go through uniform_below.

#include <cstdint>
#include <random>

namespace subquad {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    return mix_seed(a ^ mix_seed(b));
}

/// Uniform integer in [0, bound), bound > 0. Rejection sampling.
inline std::uint64_t uniform_below(Rng &rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % bound;
}

}  // namespace subquad
