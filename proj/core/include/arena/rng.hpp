#pragma once

#include <cstdint>

namespace arena {

/// SplitMix64: tiny, splittable, and bit-reproducible on every platform.
/// std:: distributions are avoided on purpose in engine code because their
/// output is implementation-defined.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Independent child stream; advancing it never perturbs this one beyond
    /// the single draw taken here.
    constexpr SplitMix64 split() { return SplitMix64(mix(next() ^ 0xD1B54A32D192ED03ull)); }

    /// Uniform integer in [0, n). n must be positive.
    constexpr std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next();
        while (v >= limit) {
            v = next();
        }
        return v % n;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    constexpr double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    constexpr std::uint64_t state() const { return state_; }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
        z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
        return z ^ (z >> 33);
    }

private:
    std::uint64_t state_;
};

} // namespace arena
