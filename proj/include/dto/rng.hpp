#pragma once

// xoshiro256++ with splitmix64 seeding. Per-trajectory streams are derived by
// the documented mixing function mix_seed(base, stream): trajectory i uses
// splitmix64 finalization of (base + (i+1) * 0x9E3779B97F4A7C15). The
// reproducibility contract is (seed -> byte-identical stream), not any
// particular generator family.

#include <cstdint>

namespace dto {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base + (stream + 1) * 0x9E3779B97F4A7C15ull;
    return splitmix64_next(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0x853C49E6748FEA9Bull) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n); multiply-shift (bias < n / 2^64, negligible here)
    std::uint32_t bounded(std::uint32_t n) {
        return std::uint32_t((__uint128_t(next()) * n) >> 64);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace dto
