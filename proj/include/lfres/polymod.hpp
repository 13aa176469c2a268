/**
 * @file lfres/polymod.hpp
 * @copyright Apache License 2.0
 *
 * Dense univariate polynomials over F_p (p < 2^62, not necessarily
 * transform-friendly). Multiplication packs coefficients into one big
 * integer per operand (Kronecker substitution), multiplies once with GMP,
 * and unpacks — exact, and softly linear in the output degree.
 */
#ifndef LFRES_POLYMOD_HPP
#define LFRES_POLYMOD_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace lfres {

// Coefficients ascending by degree, each in [0, p); no trailing zeros, so
// the zero polynomial is the empty list.
struct PolyModP {
  std::uint64_t p = 0;
  std::vector<std::uint64_t> coeff;

  bool zero() const { return coeff.empty(); }
  // Degree of the zero polynomial is conventionally -1 here.
  std::int64_t degree() const { return static_cast<std::int64_t>(coeff.size()) - 1; }

  bool operator==(const PolyModP&) const = default;
};

// Builds a polynomial from raw coefficient values: reduces mod p and strips
// trailing zeros. Rejects p < 2 and p >= 2^62.
PolyModP poly_from(std::uint64_t p, std::vector<std::uint64_t> coefficients);

PolyModP poly_add(const PolyModP& f, const PolyModP& g);
PolyModP poly_sub(const PolyModP& f, const PolyModP& g);

// Product in F_p[x]. Schoolbook below a small size cutoff, Kronecker
// substitution above it. Rejects operands with different moduli.
PolyModP polymul(const PolyModP& f, const PolyModP& g);

// Horner evaluation; the zero polynomial evaluates to 0.
std::uint64_t poly_eval(const PolyModP& f, std::uint64_t x);

// First k coefficients of the power-series inverse of h, requiring
// h(0) = 1 (every divisor reversed here is monic). k = 0 gives zero.
PolyModP inv_series(const PolyModP& h, std::size_t k);

// Remainder of f by a monic divisor g of degree >= 1, via Newton inversion
// of the reversed divisor.
PolyModP poly_rem_monic(const PolyModP& f, const PolyModP& g);

// f(x_i) for every point, in input order, via a subproduct tree: O(M(n)
// log n) instead of the quadratic pointwise Horner. Points are reduced
// mod p on entry.
std::vector<std::uint64_t> multipoint_eval(const PolyModP& f,
                                           const std::vector<std::uint64_t>& points);

// Both entries of a matrix pair evaluated over one shared subproduct tree;
// each divisor inverse is computed once and reused for the two descents.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> multipoint_eval_pair(
    const PolyModP& fa, const PolyModP& fb, const std::vector<std::uint64_t>& points,
    int threads = 1);

}  // namespace lfres

#endif  // LFRES_POLYMOD_HPP
