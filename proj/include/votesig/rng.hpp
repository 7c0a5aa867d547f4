#pragma once

#include <cstdint>

namespace votesig {

// SplitMix64 (Steele, Lea, Flood 2014; Vigna's fixed-increment variant).
// Chosen for its splittable structure: every (seed, example) pair gets an
// independent substream, so simulation output does not depend on how work
// is partitioned across threads.  The algorithm identifier "splitmix64"
// is persisted in output metadata.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Bin(j, p) as a sum of Bernoullis.  Exact, adequate for the depths
    // used here (j up to a few thousand).
    int binomial(int j, double p) {
        int c = 0;
        for (int i = 0; i < j; ++i) c += bernoulli(p) ? 1 : 0;
        return c;
    }

private:
    std::uint64_t state_;
};

// Stateless finalizer used to derive substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Substream for one example: independent of every other example's stream
// and of any worker partitioning.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream_id) {
    return SplitMix64(mix64(seed ^ mix64(stream_id)));
}

inline constexpr const char* kRngAlgorithm = "splitmix64";

} // namespace votesig
