#pragma once

#include <cstdint>

// Self-contained deterministic RNG. Standard-library distributions are
// implementation-defined, so everything that feeds program output goes
// through this header to keep results byte-identical across toolchains.
namespace fapprox {

// Finalizer from splitmix64; bijective on 64-bit ints.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed for trial `index` under `salt`
// (one salt per method keeps streams distinct even at equal indices).
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index,
                                std::uint64_t salt = 0) {
    std::uint64_t a = mix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
    return mix64(a ^ (salt * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

// xoshiro256++ seeded via splitmix64. Fixed algorithm, fixed output mapping.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = mix64(sm);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace fapprox
