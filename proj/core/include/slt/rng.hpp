#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace slt {

/// SplitMix64 finalizer. Also the documented seed-derivation mix: see
/// slt::derive_seed in harness.hpp.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic xoshiro256** generator with portable normal/uniform draws.
/// std::mt19937_64 plus std::normal_distribution would be stdlib-dependent;
/// chains must be bit-reproducible across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x = splitmix64(x);
            s = x;
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in (0, 1]; never 0, so log(u) is safe.
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
    }

    /// Standard normal via Box-Muller (cosine branch; consumes exactly two uniforms).
    double normal() noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/// Independent sub-stream seed for component `k` of a parent seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) noexcept {
    return splitmix64(seed ^ splitmix64(k + 0xD1B54A32D192ED03ULL));
}

}  // namespace slt
