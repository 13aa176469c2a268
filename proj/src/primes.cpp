/**
 * @file src/primes.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/primes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfres/detail/modarith.hpp"

namespace lfres {

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i * i <= limit; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  for (std::uint64_t i = 2; i <= limit; ++i)
    if (!composite[i]) primes.push_back(i);
  return primes;
}

PrimeList primes_in(std::uint64_t lo, std::uint64_t hi, std::size_t window) {
  if (hi < lo) throw std::invalid_argument("primes_in: hi < lo");
  if (window < 2) window = 2;

  PrimeList out;
  out.lo = lo;
  out.hi = hi;
  if (hi < 2 || hi == lo) return out;

  const auto base = primes_up_to(detail::isqrt_u64(hi));

  if (lo < 2 && hi >= 2) out.primes.push_back(2);

  // Odd-only windows over (lo, hi]. Position i of the bitset represents the
  // odd number first + 2*i.
  std::uint64_t next = std::max<std::uint64_t>(lo + 1, 3);
  if (next % 2 == 0) ++next;
  std::vector<bool> composite;
  while (next <= hi) {
    const std::uint64_t count =
        std::min<std::uint64_t>((hi - next) / 2 + 1, window / 2 + 1);
    const std::uint64_t last = next + 2 * (count - 1);
    composite.assign(count, false);
    for (const std::uint64_t p : base) {
      if (p == 2) continue;
      if (p * p > last) break;
      std::uint64_t start = std::max(p * p, ((next + p - 1) / p) * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t v = start; v <= last; v += 2 * p)
        composite[(v - next) / 2] = true;
    }
    for (std::uint64_t i = 0; i < count; ++i)
      if (!composite[i]) {
        const std::uint64_t v = next + 2 * i;
        if (v >= 3) out.primes.push_back(v);
      }
    next = last + 2;
  }
  return out;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are a known deterministic set for all 64-bit integers.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = detail::powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace lfres
