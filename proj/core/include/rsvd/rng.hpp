// Counter-based pseudo-random generator for reproducible sampling.
//
// Stream value k of seed s is mix(s + (k+1)*GAMMA), so a (seed, counter)
// pair fully determines every draw independent of platform or library.

#pragma once

#include <cstdint>
#include <cmath>

#include "rsvd/types.hpp"

namespace rsvd {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; draws exactly two uniforms per call.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Standard complex normal, E|z|^2 = 1.
    Complex cnormal() {
        const double s = 1.0 / std::sqrt(2.0);
        return Complex(normal() * s, normal() * s);
    }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace rsvd
