#pragma once

// Counter-based random numbers (Philox 4x32, 10 rounds).
//
// Every draw is a pure function of (seed, chain, sweep, slot, block, purpose),
// so parallel chains are reproducible bit for bit and any draw can be
// regenerated without replaying the stream.

#include <array>
#include <cstdint>

namespace hsvmc {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * c[0];
    const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * c[2];
    c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
         std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
}

}  // namespace detail

/// One Philox 4x32-10 block: 128 counter bits, 64 key bits -> 128 output bits.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) detail::philox_round(counter, key);
    return counter;
}

/// Stream identifiers; kept disjoint so no two draws share a counter.
enum class RandPurpose : std::uint32_t {
    kMove = 0,
    kInit = 1,
    kWidom = 2,
    kQmcShift = 3,
    kTest = 4,
};

/// Two uniform doubles in [0,1) with full 53-bit mantissas from one block.
struct UniformPair {
    double first;
    double second;
};

inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
    return double(bits >> 11) * 0x1.0p-53;
}

/// Keyed uniform draw. `slot` and `block` index independent draws within one
/// (sweep, purpose) context, e.g. slot = particle and block = draw pair.
inline UniformPair uniform_pair(std::uint64_t seed, std::uint32_t chain, RandPurpose purpose,
                                std::uint32_t sweep, std::uint32_t slot, std::uint32_t block) {
    const std::array<std::uint32_t, 4> ctr = {
        sweep, slot, block, (chain << 16) | (std::uint32_t(purpose) & 0xFFFFu)};
    const std::array<std::uint32_t, 2> key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    const auto words = philox4x32(ctr, key);
    return {to_unit_double(words[1], words[0]), to_unit_double(words[3], words[2])};
}

}  // namespace hsvmc
