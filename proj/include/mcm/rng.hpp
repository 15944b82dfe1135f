#pragma once
#include <cstdint>

namespace mcm {

// Counter-based generator: value k of stream `seed` is a pure function of
// (seed, k), so batch runs can pull independent streams without shared state.
// Mixer is splitmix64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t k) {
    return splitmix64(seed + k * 0x9E3779B97F4A7C15ull);
}

// Uniform double in [0,1) from the top 53 bits.
inline double counter_unit(std::uint64_t seed, std::uint64_t k) {
    return static_cast<double>(counter_u64(seed, k) >> 11) * 0x1.0p-53;
}

} // namespace mcm
