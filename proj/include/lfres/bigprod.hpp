/**
 * @file lfres/bigprod.hpp
 * @copyright Apache License 2.0
 *
 * Product-tree and remainder-tree machinery over arbitrary-precision
 * integers and MatPairs. Multiplication cost is inherited from GMP, which
 * is subquadratic for large operands.
 */
#ifndef LFRES_BIGPROD_HPP
#define LFRES_BIGPROD_HPP

#include <cstdint>
#include <vector>

#include "lfres/matpair.hpp"

namespace lfres {

// Binary product tree. levels[0] holds the single root; levels.back() holds
// the leaves in input order. An unpaired node at the end of a level is
// promoted to the next level unchanged.
struct ProductTree {
  std::vector<std::vector<mpz_class>> levels;

  const mpz_class& root() const { return levels.front().front(); }
  std::size_t leaf_count() const { return levels.back().size(); }
};

// Same shape with MatPair nodes; an internal node is combine(left, right),
// left child covering the smaller leaf indices.
struct MatProductTree {
  std::vector<std::vector<MatPair>> levels;

  const MatPair& root() const { return levels.front().front(); }
  std::size_t leaf_count() const { return levels.back().size(); }
};

// Builds the tree bottom-up. Rejects empty input and non-positive leaves.
ProductTree product_tree(std::vector<mpz_class> leaves, int threads = 1);
ProductTree product_tree(const std::vector<std::uint64_t>& leaves, int threads = 1);

MatProductTree mat_product_tree(std::vector<MatPair> leaves, int threads = 1);

// C_{k_lo} * ... * C_{k_hi} by balanced splitting. Identity for an empty
// range (k_lo > k_hi). k_lo must be >= 1.
MatPair mat_product_range(std::uint64_t k_lo, std::uint64_t k_hi, int threads = 1);

// Top-down remainder tree: leaf i of the result is value mod leaf modulus i.
// Only two adjacent levels of intermediate values are alive at any moment.
// Rejects a zero modulus anywhere in the tree.
std::vector<mpz_class> remainder_walk(const mpz_class& value, const ProductTree& moduli,
                                      int threads = 1);
std::vector<MatPair> remainder_walk(const MatPair& value, const ProductTree& moduli,
                                    int threads = 1);

}  // namespace lfres

#endif  // LFRES_BIGPROD_HPP
