#pragma once

#include <cstdint>

namespace hitstats {

// splitmix64 finalizer (Steele, Lea, Flood 2014).  Bijective on uint64.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Minimal counter-based stream built on splitmix64.  State is 8 bytes and
// seeding is free, which matters when every Monte Carlo trial gets its own
// stream.  Quality is ample for occupation statistics at desk scale.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [a,b).
    double next_double(double a, double b) { return a + (b - a) * next_double(); }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

// Derives an independent child stream from (seed, index).  Trials seeded this
// way give results that do not depend on thread scheduling or shard layout.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + 0x9e3779b97f4a7c15ull * (index + 1));
}

} // namespace hitstats
