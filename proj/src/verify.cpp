/**
 * @file src/verify.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/verify.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "lfres/detail/modarith.hpp"

namespace lfres {

namespace {

using u64 = std::uint64_t;

PolyMatPair poly_combine(const PolyMatPair& x, const PolyMatPair& y) {
  PolyMatPair out;
  out.a = polymul(x.a, y.a);
  out.b = poly_add(polymul(x.a, y.b), x.b);
  return out;
}

// C(x+lo) ... C(x+hi), balanced.
PolyMatPair giant_range(u64 lo, u64 hi, u64 p) {
  if (lo == hi) {
    PolyMatPair leaf;
    leaf.a = poly_from(p, {lo, 1});  // x + lo
    leaf.b = poly_from(p, {1});
    return leaf;
  }
  const u64 mid = lo + (hi - lo) / 2;
  return poly_combine(giant_range(lo, mid, p), giant_range(mid + 1, hi, p));
}

}  // namespace

PolyMatPair build_giant_poly(u64 s, u64 p) {
  if (s < 1) throw std::invalid_argument("build_giant_poly: s must be >= 1");
  if (static_cast<unsigned __int128>(s) * s >= p)
    throw std::invalid_argument("build_giant_poly: s^2 must be < p");
  return giant_range(1, s, p);
}

BalancedResidue verify_residue(u64 p, int threads) {
  if (p <= 3 || (p & 1) == 0)
    throw std::invalid_argument("verify_residue: p must be an odd prime > 3");

  const u64 s = detail::isqrt_u64(p - 1);
  const PolyMatPair giant = build_giant_poly(s, p);

  std::vector<u64> points(s);
  for (u64 j = 0; j < s; ++j) points[j] = j * s % p;
  const auto [va, vb] = multipoint_eval_pair(giant.a, giant.b, points, threads);

  // Fold the giant steps in ascending order: after step j the pair is
  // M_{(j+1)s} mod p. Matrix multiplication does not commute; order is load-bearing.
  u64 a = 1 % p;
  u64 b = 0;
  for (u64 j = 0; j < s; ++j) {
    b = detail::addmod_u64(detail::mulmod_u64(a, vb[j], p), b, p);
    a = detail::mulmod_u64(a, va[j], p);
  }
  // Trailing factors C_k for s^2 < k <= p-1, fewer than 2s+1 of them.
  for (u64 k = s * s + 1; k <= p - 1; ++k) {
    b = detail::addmod_u64(a, b, p);
    a = detail::mulmod_u64(a, k, p);
  }

  if (a != p - 1)
    throw WilsonError("verify_residue: (p-1)! not congruent to -1 mod " +
                      std::to_string(p) + "; p is composite or arithmetic is broken");
  return balance(detail::addmod_u64(a, b, p), p);
}

}  // namespace lfres
