#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sfdlab::philox {

/// Philox4x32-10 block function: 10 rounds of the multiply-xor network
/// over a 128-bit counter with a 64-bit key. Counter-based, so any block
/// is addressable in O(1), which is what makes increments of a path
/// reproducible in isolation and safe to generate out of order.
inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kBump0 = 0x9E3779B9u;
    constexpr std::uint32_t kBump1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kBump0;
            key[1] += kBump1;
        }
        std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Packs a (seed, stream, index, level) address into a counter/key pair
/// and returns the two 64-bit words of the block.
inline std::array<std::uint64_t, 2> words(std::uint64_t seed, std::uint32_t stream,
                                          std::uint64_t index, std::uint32_t level) {
    std::array<std::uint32_t, 4> ctr = {stream, static_cast<std::uint32_t>(index),
                                        static_cast<std::uint32_t>(index >> 32), level};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    auto x = block(ctr, key);
    return {static_cast<std::uint64_t>(x[0]) | (static_cast<std::uint64_t>(x[1]) << 32),
            static_cast<std::uint64_t>(x[2]) | (static_cast<std::uint64_t>(x[3]) << 32)};
}

/// Uniform variate in [0, 1) from the addressed block.
inline double uniform(std::uint64_t seed, std::uint32_t stream, std::uint64_t index,
                      std::uint32_t level) {
    auto w = words(seed, stream, index, level);
    return std::ldexp(static_cast<double>(w[0] >> 11), -53);
}

/// Standard normal variate from the addressed block via Box-Muller.
/// u1 lands in (0, 1] so the logarithm is always finite.
inline double normal(std::uint64_t seed, std::uint32_t stream, std::uint64_t index,
                     std::uint32_t level) {
    auto w = words(seed, stream, index, level);
    double u1 = 1.0 - std::ldexp(static_cast<double>(w[0] >> 11), -53);
    double u2 = std::ldexp(static_cast<double>(w[1] >> 11), -53);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace sfdlab::philox
