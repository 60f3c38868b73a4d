#include "mlb/rng.hpp"

#include <cmath>

namespace mlb {

std::uint64_t SplitMix64::next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
    return lo + next_double() * (hi - lo);
}

double SplitMix64::exponential(double mean) {
    // 1 - u is never zero since u < 1.
    return -mean * std::log(1.0 - next_double());
}

} // namespace mlb
