// SPDX-License-Identifier: Apache-2.0
//
// Seeded counter-style PRNG for reproducible Monte Carlo runs.
//
// The generator is a plain splitmix64 walk. We deliberately avoid
// std::normal_distribution and friends: their output is implementation
// defined, and field CSVs must be byte-identical across standard
// libraries as long as libm rounds the same way.

#ifndef SWEEPLOC_RNG_HPP
#define SWEEPLOC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace sweeploc {

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    /// Derive an independent stream for one (cell, trial) pair of a grid
    /// sweep. Same arguments, same stream, no matter how work is split
    /// across threads.
    static RngStream for_cell_trial(std::uint64_t master_seed,
                                    std::uint64_t cell_index,
                                    std::uint64_t trial_index) {
        return RngStream(mix(mix(master_seed, cell_index), trial_index));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 usable bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. No cached spare: one sample, two
    /// uniforms, so the draw count per observation is fixed.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace sweeploc

#endif // SWEEPLOC_RNG_HPP
