#pragma once

#include <cstdint>
#include <random>

namespace vrnmf {

/// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seedable random source: std::mt19937_64 seeded with splitmix64(seed).
/// split(stream) yields a child generator whose seed is
/// splitmix64(seed ^ splitmix64(stream + 1)), so parallel trials can draw
/// from disjoint, reproducible streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    Rng split(std::uint64_t stream) const { return Rng(seed_ ^ splitmix64(stream + 1)); }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace vrnmf
