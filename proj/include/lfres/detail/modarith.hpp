/**
 * @file lfres/detail/modarith.hpp
 * @copyright Apache License 2.0
 *
 * Small fixed-width modular helpers shared by the sieve, the polynomial
 * layer, and the verifier. Not part of the public surface.
 */
#ifndef LFRES_DETAIL_MODARITH_HPP
#define LFRES_DETAIL_MODARITH_HPP

#include <cmath>
#include <cstdint>

namespace lfres::detail {

inline std::uint64_t isqrt_u64(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

// (a + b) mod m for a, b already in [0, m); safe for m > 2^63.
inline std::uint64_t addmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return a >= m - b && b != 0 ? a - (m - b) : a + b;
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return r;
}

}  // namespace lfres::detail

#endif  // LFRES_DETAIL_MODARITH_HPP
