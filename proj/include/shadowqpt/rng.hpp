// Copyright 2026 The shadowqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHADOWQPT_RNG_HPP
#define SHADOWQPT_RNG_HPP

#include <cstdint>

namespace shadowqpt {

// Stateless mixing function used to derive stream seeds.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic pseudo-random stream (xoshiro256**).
//
// The generator and every draw routine are pinned here rather than taken
// from <random> because the standard distributions are implementation
// defined, and record files produced from a given seed must be identical
// across toolchains.
class RngStream {
  public:
    explicit RngStream(uint64_t seed) {
        uint64_t x = seed;
        for (auto &w : s_) {
            x = splitmix64(x);
            w = x;
        }
        // A zero state would be a fixed point; splitmix64 of any seed makes
        // that astronomically unlikely, but guard anyway.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
            s_[0] = 0x9E3779B97F4A7C15ULL;
        }
    }

    uint64_t next() {
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Rejection sampling over a power-of-two
    // mask keeps the draw unbiased and the sequence reproducible.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) {
            return 0;
        }
        uint64_t mask = ~uint64_t{0} >> __builtin_clzll(bound - 1 | 1);
        for (;;) {
            uint64_t v = next() & mask;
            if (v < bound) {
                return v;
            }
        }
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    bool bit() { return (next() >> 63) != 0; }

  private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    uint64_t s_[4];
};

// Independent stream for one unit of work. Streams are keyed by the master
// seed and a stable index, never by worker identity, so results do not
// depend on how work is scheduled.
inline RngStream substream(uint64_t master_seed, uint64_t index, uint64_t salt = 0) {
    uint64_t k = splitmix64(master_seed ^ 0xA5A5A5A55A5A5A5AULL);
    k = splitmix64(k ^ index);
    k = splitmix64(k ^ (salt * 0xD1B54A32D192ED03ULL));
    return RngStream(k);
}

}  // namespace shadowqpt

#endif
