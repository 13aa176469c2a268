/**
 * @file lfres/primes.hpp
 * @copyright Apache License 2.0
 */
#ifndef LFRES_PRIMES_HPP
#define LFRES_PRIMES_HPP

#include <cstdint>
#include <vector>

namespace lfres {

// Primes in the half-open interval (lo, hi], ascending.
struct PrimeList {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::vector<std::uint64_t> primes;
};

// Segmented sieve of Eratosthenes. Base primes up to sqrt(hi) are sieved
// once, then windows of `window` numbers are marked with an odd-only bitset;
// 2 is special-cased. Memory stays O(sqrt(hi) + window).
PrimeList primes_in(std::uint64_t lo, std::uint64_t hi,
                    std::size_t window = std::size_t{1} << 20);

// All primes p <= limit, ascending. Plain in-memory sieve.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

}  // namespace lfres

#endif  // LFRES_PRIMES_HPP
