#pragma once

#include <array>
#include <cstdint>

namespace jamsim {

// Counter-based random numbers (Philox 4x32-10). Every draw is a pure
// function of (seed, run, t, stream, idx), so simulations replay
// bit-identically no matter how runs are scheduled across workers.
namespace rng {

inline constexpr std::uint32_t kFailureStream = 0;
inline constexpr std::uint32_t kDisturbanceStream = 1;
inline constexpr std::uint32_t kControlNoiseStream = 2;

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 2> key,
                                        std::array<std::uint32_t, 4> counter);

/// Uniform draw strictly inside (0, 1).
double uniform01(std::uint64_t seed, std::uint64_t run, std::uint64_t t,
                 std::uint32_t stream, std::uint32_t idx);

/// Standard normal via Box-Muller; consumes draw indices 2*pair and 2*pair+1.
double standard_normal(std::uint64_t seed, std::uint64_t run, std::uint64_t t,
                       std::uint32_t stream, std::uint32_t pair);

}  // namespace rng

/// Addresses one (seed, run, t) cell of the counter space; disturbance
/// samplers receive this so they can pull as many independent draws
/// as they need without touching other streams.
struct RandomSource {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  std::uint64_t t = 0;

  double uniform(std::uint32_t stream, std::uint32_t idx) const {
    return rng::uniform01(seed, run, t, stream, idx);
  }
  double normal(std::uint32_t stream, std::uint32_t pair) const {
    return rng::standard_normal(seed, run, t, stream, pair);
  }
};

}  // namespace jamsim
