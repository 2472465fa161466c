#pragma once

#include <bit>
#include <cstdint>

namespace nsar::seed {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for `tag` under `parent`. For a fixed parent, distinct tags give
/// distinct children (the affine step and the finalizer are both injective).
constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t tag) noexcept {
    return mix(parent + (tag + 1) * golden_gamma);
}

inline std::uint64_t derive(std::uint64_t parent, double tag) noexcept {
    return derive(parent, std::bit_cast<std::uint64_t>(tag));
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace nsar::seed
