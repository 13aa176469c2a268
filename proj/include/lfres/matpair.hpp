/**
 * @file lfres/matpair.hpp
 * @copyright Apache License 2.0
 *
 * Reduced form of the upper-triangular matrices whose products carry the
 * factorial and left factorial together: the matrix [[a, b], [0, 1]] is
 * stored as the pair (a, b), since the bottom row never changes.
 */
#ifndef LFRES_MATPAIR_HPP
#define LFRES_MATPAIR_HPP

#include <cstdint>
#include <gmpxx.h>

namespace lfres {

struct MatPair {
  mpz_class a;  // (1,1) entry
  mpz_class b;  // (1,2) entry

  bool operator==(const MatPair&) const = default;
};

// Multiplicative identity, [[1, 0], [0, 1]].
MatPair mat_identity();

// C_k = [[k, 1], [0, 1]]. The k = 0 matrix is never part of any product;
// requesting it is always a caller bug.
MatPair c_of(std::uint64_t k);

// Matrix product [[x.a, x.b],[0,1]] * [[y.a, y.b],[0,1]] in pair form:
// (x.a * y.a, x.a * y.b + x.b).
MatPair combine(const MatPair& x, const MatPair& y);

// x = combine(x, y) without the temporary.
void combine_inplace(MatPair& x, const MatPair& y);

// Entry-wise reduction into [0, M). M must be positive. The copying form
// writes into a fresh pair, never duplicating the (possibly huge) input.
MatPair reduce(const MatPair& x, const mpz_class& modulus);
void reduce_inplace(MatPair& x, const mpz_class& modulus);

// combine followed by reduction, for fold loops that stay below a modulus.
void combine_mod_inplace(MatPair& x, const MatPair& y, const mpz_class& modulus);

// (0! + 1! + ... + (p-1)!) mod p by direct summation. O(p) time, O(1)
// space. p >= 2; composite p is allowed, the sum is a plain modular value.
std::uint64_t left_factorial_oracle(std::uint64_t p);

// Signed representative of a residue class, in (-p/2, p/2].
struct BalancedResidue {
  std::int64_t value = 0;
  std::uint64_t p = 0;

  bool operator==(const BalancedResidue&) const = default;
};

// Maps r in [0, p) to its balanced representative. Rejects r >= p.
BalancedResidue balance(std::uint64_t r, std::uint64_t p);

}  // namespace lfres

#endif  // LFRES_MATPAIR_HPP
