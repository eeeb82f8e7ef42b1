#pragma once

// Counter-based pseudo-random primitive (Threefry-2x64, 20 rounds). Every
// draw is a pure function of (key, counter), which is what the reproducibility
// and shift contracts of the sequence model need: random access, no state.

#include <array>
#include <cstdint>

namespace randdyn {

struct Counter2x64 {
    std::uint64_t v0 = 0, v1 = 0;
};

inline std::array<std::uint64_t, 2> threefry2x64(Counter2x64 ctr, Counter2x64 key) {
    constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;
    constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key.v0, key.v1, kParity ^ key.v0 ^ key.v1};
    std::uint64_t x0 = ctr.v0 + ks[0];
    std::uint64_t x1 = ctr.v1 + ks[1];
    auto rotl = [](std::uint64_t v, int r) { return (v << r) | (v >> (64 - r)); };
    for (int round = 0; round < 20; ++round) {
        x0 += x1;
        x1 = rotl(x1, kRot[round % 8]);
        x1 ^= x0;
        if (round % 4 == 3) {
            const std::uint64_t s = static_cast<std::uint64_t>(round / 4 + 1);
            x0 += ks[s % 3];
            x1 += ks[(s + 1) % 3] + s;
        }
    }
    return {x0, x1};
}

// Uniform double in [0, 1) from 53 bits.
inline double to_unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace randdyn
