#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// Every draw is a pure function of (seed, purpose, a, b, c).  Monte Carlo loops
// address their noise by sample / step / mode index, so results do not depend
// on evaluation order or thread count, and growing a sample count extends the
// previous samples instead of reshuffling them.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace wou::rng {

/// Domain separation tag; streams with different purposes never collide.
enum class Purpose : std::uint32_t {
  base_point = 1,
  coefficient = 2,
  transition = 3,
  mala_proposal = 4,
  mala_accept = 5,
  orthonormal_basis = 6,
  cloud = 7,
  auxiliary = 8,
};

struct Counter {
  Purpose purpose;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;
};

namespace detail {

inline std::array<std::uint32_t, 4> philox_round(std::array<std::uint32_t, 4> ctr,
                                                 std::array<std::uint32_t, 2> key) {
  constexpr std::uint64_t m0 = 0xD2511F53u;
  constexpr std::uint64_t m1 = 0xCD9E8D57u;
  const std::uint64_t p0 = m0 * ctr[0];
  const std::uint64_t p1 = m1 * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::array<std::uint32_t, 4> ctr) {
  std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (int round = 0; round < 10; ++round) {
    ctr = detail::philox_round(ctr, key);
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
  return ctr;
}

/// Two independent uniforms in the open interval (0, 1), 53 bits each.
inline std::pair<double, double> uniform_pair(std::uint64_t seed, Counter ctr) {
  const auto out = philox4x32(seed, {static_cast<std::uint32_t>(ctr.purpose), ctr.a, ctr.b, ctr.c});
  const std::uint64_t x = (std::uint64_t{out[0]} << 32) | out[1];
  const std::uint64_t y = (std::uint64_t{out[2]} << 32) | out[3];
  constexpr double scale = 0x1.0p-53;
  return {(static_cast<double>(x >> 11) + 0.5) * scale, (static_cast<double>(y >> 11) + 0.5) * scale};
}

inline double uniform(std::uint64_t seed, Counter ctr) { return uniform_pair(seed, ctr).first; }

/// Two independent standard normals (Box-Muller on one Philox block).
inline std::pair<double, double> normal_pair(std::uint64_t seed, Counter ctr) {
  const auto [u1, u2] = uniform_pair(seed, ctr);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

inline double normal(std::uint64_t seed, Counter ctr) { return normal_pair(seed, ctr).first; }

/// Independent child seed, used to give sub-experiments their own key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child) {
  const auto out = philox4x32(seed, {static_cast<std::uint32_t>(Purpose::auxiliary), static_cast<std::uint32_t>(child),
                                     static_cast<std::uint32_t>(child >> 32), 0xA5A5A5A5u});
  return (std::uint64_t{out[0]} << 32) | out[1];
}

}  // namespace wou::rng
