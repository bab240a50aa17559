#pragma once

#include <cstdint>

namespace saddleflow {

/// Seed for the deterministic generators. The same seed yields bit-identical
/// sample streams within one build of the library.
struct RngSeed {
    std::uint64_t value = 0;
};

/// SplitMix64: the 64-bit counter-based generator of Steele, Lea and Flood.
/// Chosen because its output is a pure function of (seed, call index), which
/// keeps every derived stream reproducible and cheap to split.
class SplitMix64 {
public:
    explicit SplitMix64(RngSeed seed) : state_(seed.value) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1]; never returns 0 so log() is safe.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// A decorrelated child seed, for splitting one seed into substreams.
    RngSeed fork() { return RngSeed{next_u64()}; }

private:
    std::uint64_t state_;
};

/// Standard normal draws via the Box-Muller transform over SplitMix64.
class GaussianSampler {
public:
    explicit GaussianSampler(RngSeed seed) : rng_(seed) {}

    double next();

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace saddleflow
