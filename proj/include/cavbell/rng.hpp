// rng.hpp
// Seedable pseudorandom streams for Monte Carlo runs.
#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace cavbell {

// splitmix64 finalizer, used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 engine with uniform doubles built from raw engine words.
// std::uniform_real_distribution is not guaranteed to emit identical
// streams across standard libraries; (word >> 11) * 2^-53 is.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Independent substream for (seed, index), e.g. one per trial or
    // per sweep point. Streams with distinct indices do not overlap in
    // any way that matters at the trial counts used here.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1)));
    }

    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform point on the closed disk of the given radius (rejection
    // sampling, which stays reproducible across platforms).
    std::pair<double, double> disk(double radius) {
        if (radius == 0.0) return {0.0, 0.0};
        double u = 0.0, v = 0.0;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
        } while (u * u + v * v > 1.0);
        return {radius * u, radius * v};
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace cavbell
