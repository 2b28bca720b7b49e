#pragma once

#include <cstdint>
#include <random>

namespace uavnav {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seed derivation
// so that derived streams are decorrelated even for adjacent inputs.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Folds a value into a seed-derivation chain. Order-sensitive.
constexpr std::uint64_t seed_combine(std::uint64_t state, std::uint64_t value) {
    return splitmix64_mix(state ^ splitmix64_mix(value));
}

// All simulator randomness flows through this wrapper. The raw mt19937_64
// sequence is pinned by the standard, and the mappings below avoid
// std::uniform_*_distribution, whose output is implementation-defined, so a
// given seed reproduces bit-identical runs on any conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in {0, ..., n-1}; n >= 1.
    std::uint32_t below(std::uint32_t n) {
        const std::uint64_t span = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::uint32_t>(x % span);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace uavnav
