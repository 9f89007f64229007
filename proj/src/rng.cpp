#include "jamsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace jamsim::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::array<std::uint32_t, 4> next = {
      static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
      static_cast<std::uint32_t>(p1),
      static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
      static_cast<std::uint32_t>(p0),
  };
  ctr = next;
  key[0] += kWeyl0;
  key[1] += kWeyl1;
}

inline std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t run, std::uint64_t t,
                               std::uint32_t stream, std::uint32_t idx) {
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
  };
  // run and t each fit 32 bits at the compute scales this project allows
  // (the CLI caps horizon*runs at 1e8); the high words are folded in anyway.
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(run) ^ static_cast<std::uint32_t>(t >> 32),
      static_cast<std::uint32_t>(t),
      static_cast<std::uint32_t>(run >> 32) ^ stream,
      idx,
  };
  const auto out = philox4x32(key, counter);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter) {
  for (int round = 0; round < 10; ++round) philox_round(counter, key);
  return counter;
}

double uniform01(std::uint64_t seed, std::uint64_t run, std::uint64_t t,
                 std::uint32_t stream, std::uint32_t idx) {
  const std::uint64_t bits = draw_bits(seed, run, t, stream, idx);
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are never returned.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t run, std::uint64_t t,
                       std::uint32_t stream, std::uint32_t pair) {
  const double u1 = uniform01(seed, run, t, stream, 2 * pair);
  const double u2 = uniform01(seed, run, t, stream, 2 * pair + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace jamsim::rng
