#pragma once

#include <cstdint>

namespace mlb {

/// SplitMix64 (Steele/Lea/Vigna). Chosen because the algorithm is a fixed,
/// published 64-bit generator, so traces reproduce bit-for-bit across
/// implementations and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_double();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Exponential with the given mean, by inverse CDF.
    double exponential(double mean);

private:
    std::uint64_t state_;
};

} // namespace mlb
