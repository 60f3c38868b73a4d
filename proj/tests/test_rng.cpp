#include "mlb/rng.hpp"

#include <doctest.h>

using namespace mlb;

// Reference outputs computed with an independent implementation of the
// published algorithm; they also match the widely circulated test vectors.
TEST_CASE("splitmix64 reference stream, seed 0") {
    SplitMix64 rng(0);
    CHECK(rng.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next_u64() == 0x06c45d188009454fULL);
    CHECK(rng.next_u64() == 0xf88bb8a8724c81ecULL);
    CHECK(rng.next_u64() == 0x1b39896a51a8749bULL);
}

TEST_CASE("splitmix64 reference stream, seed 1234567") {
    SplitMix64 rng(1234567);
    CHECK(rng.next_u64() == 0x599ed017fb08fc85ULL);
    CHECK(rng.next_u64() == 0x2c73f08458540fa5ULL);
    CHECK(rng.next_u64() == 0x883ebce5a3f27c77ULL);
    CHECK(rng.next_u64() == 0x3fbef740e9177b3fULL);
    CHECK(rng.next_u64() == 0xe3b8346708cb5ecdULL);
}

TEST_CASE("double conversion uses the high 53 bits") {
    SplitMix64 rng(42);
    CHECK(rng.next_double() == doctest::Approx(0.7415648787718233).epsilon(1e-15));
    CHECK(rng.next_double() == doctest::Approx(0.1599103928769201).epsilon(1e-15));
    CHECK(rng.next_double() == doctest::Approx(0.27860113025513866).epsilon(1e-15));
    CHECK(rng.next_double() == doctest::Approx(0.34419071652363753).epsilon(1e-15));
}

TEST_CASE("doubles stay in [0, 1) and reproduce per seed") {
    SplitMix64 a(99), b(99);
    for (int i = 0; i < 10000; ++i) {
        const double v = a.next_double();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        CHECK(v == b.next_double());
    }
}

TEST_CASE("uniform respects bounds, exponential is non-negative") {
    SplitMix64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(2.5, 9.5);
        CHECK(u >= 2.5);
        CHECK(u < 9.5);
        CHECK(rng.exponential(3.0) >= 0.0);
    }
}
