#pragma once

#include <cstdint>

namespace spectrace::rng {

// SplitMix64 finalizer. Used as a counter-based hash so that random draws are
// pure functions of (seed, counter) with no generator state to share between
// threads.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(a ^ (0xd1b54a32d192ed03ULL * (b + 1)));
}

// Uniform double in [0, 1).
constexpr double to_unit_double(std::uint64_t word) noexcept {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace spectrace::rng
