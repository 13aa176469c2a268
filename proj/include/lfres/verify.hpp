/**
 * @file lfres/verify.hpp
 * @copyright Apache License 2.0
 *
 * Independent O(p^0.5+eps) computation of a single r_p = !p mod p:
 * baby-step/giant-step over the matrix factorial. The product
 * C_1 ... C_{p-1} is grouped into s = floor(sqrt(p-1)) blocks of s factors;
 * one polynomial matrix G(x) = C(x+1)...C(x+s) describes every block, its
 * entries are evaluated at x = 0, s, ..., (s-1)s by fast multipoint
 * evaluation, the block matrices are folded in order, and the < 2s+1
 * trailing factors are multiplied in directly.
 */
#ifndef LFRES_VERIFY_HPP
#define LFRES_VERIFY_HPP

#include <cstdint>
#include <stdexcept>

#include "lfres/matpair.hpp"
#include "lfres/polymod.hpp"

namespace lfres {

// [[a(x), b(x)], [0, 1]] with entries in F_p[x].
struct PolyMatPair {
  PolyModP a;
  PolyModP b;

  bool operator==(const PolyMatPair&) const = default;
};

// G(x) = C(x+1) C(x+2) ... C(x+s) by balanced splitting, so that G(js)
// equals the MatPair product C_{js+1} ... C_{js+s} for every integer j.
// Requires s >= 1 and s^2 < p.
PolyMatPair build_giant_poly(std::uint64_t s, std::uint64_t p);

// M_{p-1} mod p came out with (p-1)! not congruent to -1: either p is
// composite or the arithmetic above it is broken. Always a hard stop.
class WilsonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// r_p for a single odd prime p > 3, in O(p^0.5+eps) time and O(p^0.5)
// space, with Wilson's theorem as an end-to-end self-check.
BalancedResidue verify_residue(std::uint64_t p, int threads = 1);

}  // namespace lfres

#endif  // LFRES_VERIFY_HPP
