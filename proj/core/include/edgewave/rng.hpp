// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace edgewave {

// PCG32 (Melissa O'Neill, pcg-random.org). Deterministic across platforms,
// cheap to fork into independent streams: one stream per worker.
class Pcg32 {
  public:
    Pcg32() { seed(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL); }
    Pcg32(uint64_t initstate, uint64_t initseq = 1) { seed(initstate, initseq); }

    void seed(uint64_t initstate, uint64_t initseq) {
        state_ = 0u;
        inc_ = (initseq << 1u) | 1u;
        next_u32();
        state_ += initstate;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
    }

    uint64_t next_u64() {
        return (static_cast<uint64_t>(next_u32()) << 32) | next_u32();
    }

    // Uniform in [0,1) with 53 random mantissa bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0,n).
    uint32_t next_bounded(uint32_t n) {
        return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
    }

  private:
    uint64_t state_ = 0;
    uint64_t inc_ = 0;
};

}  // namespace edgewave
