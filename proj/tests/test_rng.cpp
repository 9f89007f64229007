#include <cmath>

#include <doctest.h>

#include "jamsim/rng.hpp"

using namespace jamsim;

TEST_SUITE("rng") {

TEST_CASE("philox 4x32-10 reference vectors") {
  // Published known-answer vectors for the 10-round 4x32 generator.
  auto out = rng::philox4x32({0, 0}, {0, 0, 0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = rng::philox4x32({0xffffffffu, 0xffffffffu},
                        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = rng::philox4x32({0xa4093822u, 0x299f31d0u},
                        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("draws are pure functions of the counter tuple") {
  const double a = rng::uniform01(7, 3, 11, 0, 0);
  const double b = rng::uniform01(7, 3, 11, 0, 0);
  CHECK(a == b);
  CHECK(rng::uniform01(7, 3, 11, 1, 0) != a);
  CHECK(rng::uniform01(7, 3, 12, 0, 0) != a);
  CHECK(rng::uniform01(7, 4, 11, 0, 0) != a);
  CHECK(rng::uniform01(8, 3, 11, 0, 0) != a);
}

TEST_CASE("uniform draws stay strictly inside (0,1) and have the right mean") {
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng::uniform01(123, 0, static_cast<std::uint64_t>(i), 0, 0);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of the mean is 1/sqrt(12 n) ~ 9.1e-4; allow five of those.
  CHECK(std::fabs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("box-muller normals have unit variance") {
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng::standard_normal(99, 1, static_cast<std::uint64_t>(i), 1, 0);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

}  // TEST_SUITE
