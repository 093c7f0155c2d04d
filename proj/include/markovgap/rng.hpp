#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace markovgap {

// SplitMix64. The exact update rule is part of the reproducibility contract:
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// uniform() = ((next() >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
// gaussian() is Box-Muller on two consecutive uniforms u1, u2:
//   sqrt(-2 ln u1) * cos(2 pi u2); the sine branch is not cached.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n; }

  private:
    std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and a stream label.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (a + 1)) ^ (0x8CB92BA72F3D8DD7ULL * (b + 1)));
    g.next();
    return g.next();
}

}  // namespace markovgap
