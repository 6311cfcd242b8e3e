// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace seirs {

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Stateless: every draw is a pure function
/// of (key, counter), so ensemble members can be generated in any order, on
/// any thread, with bit-identical results.
namespace philox {

struct Block {
    uint32_t v[4];
};

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline Block generate(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                      uint32_t k0, uint32_t k1) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, c0, hi0, lo0);
        mulhilo(M1, c2, hi1, lo1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += W0;
        k1 += W1;
    }
    return Block{{c0, c1, c2, c3}};
}

/// Uniform in (0, 1] from 53 random bits; never 0, so log() is safe.
inline double to_unit(uint32_t hi, uint32_t lo) {
    const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace philox

/// One logical stream of standard normals per (seed, path). Draws are keyed
/// by (step, component, mode); no sequential state is kept, so two
/// simulations that address the same keys consume the same randomness
/// (common random numbers across truncation levels and step sizes).
class RngStream {
public:
    RngStream(uint64_t seed, uint32_t path_index)
        : seed_(seed), path_(path_index) {}

    uint64_t seed() const { return seed_; }
    uint32_t path_index() const { return path_; }

    struct NormalPair {
        double z0, z1;
    };

    /// Two independent standard normals (Box-Muller) from one Philox block,
    /// keyed by (step, component, pair). Modes 2p and 2p+1 share a block.
    NormalPair normal_pair(uint64_t step, uint32_t component, uint32_t pair) const {
        const uint32_t c3 = (component << 26) | (pair & 0x03FFFFFFu);
        const philox::Block b = philox::generate(
            static_cast<uint32_t>(step), static_cast<uint32_t>(step >> 32),
            path_, c3, static_cast<uint32_t>(seed_),
            static_cast<uint32_t>(seed_ >> 32));
        const double u1 = philox::to_unit(b.v[0], b.v[1]);
        const double u2 = philox::to_unit(b.v[2], b.v[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(angle), r * std::sin(angle)};
    }

    /// Standard normal for Brownian increment draw (step, component, mode).
    /// component < 8, mode < 2^27.
    double normal(uint64_t step, uint32_t component, uint32_t mode) const {
        const NormalPair p = normal_pair(step, component, mode >> 1);
        return (mode & 1u) ? p.z1 : p.z0;
    }

private:
    uint64_t seed_;
    uint32_t path_;
};

}  // namespace seirs
