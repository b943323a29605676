#pragma once

// Seed derivation and portable variate generation. Engines come from <random>;
// the conversions to uniform/normal variates are written out so that streams
// are identical across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>

#include "polqpt/su2.hpp"

namespace polqpt {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for stream `index` of `root`. Order independent, so samples can
/// be generated in any order or in parallel.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
    return mix64(mix64(root) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
[[nodiscard]] constexpr double unit_from_bits(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return unit_from_bits(engine_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        has_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Standard normal variate as a pure function of (seed, counter).
[[nodiscard]] inline double counter_normal(std::uint64_t seed, std::uint64_t counter) noexcept {
    const std::uint64_t a = derive_seed(seed, 2 * counter);
    const std::uint64_t b = derive_seed(seed, 2 * counter + 1);
    const double u1 = 1.0 - unit_from_bits(a);
    const double u2 = unit_from_bits(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace polqpt
