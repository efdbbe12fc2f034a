#pragma once

#include <cstdint>

// Counter-based integer hashing used for every source of pseudo-randomness
// in the library. No global RNG state exists: each value is a pure function
// of (seed, salt, counters...), so generation is order-independent,
// parallelism-safe, and bit-identical across platforms.

namespace dmscope::detail {

// SplitMix64 finalizer (Steele et al.); full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_u64(std::uint64_t seed) noexcept { return mix64(seed); }

template <typename... Rest>
constexpr std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t next, Rest... rest) noexcept {
    return hash_u64(mix64(seed ^ mix64(next)), rest...);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double uniform01(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform double in [-1, 1).
constexpr double uniform_pm1(std::uint64_t h) noexcept { return 2.0 * uniform01(h) - 1.0; }

}  // namespace dmscope::detail
