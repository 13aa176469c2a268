/**
 * @file src/bigprod.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/bigprod.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "lfres/parallel.hpp"

namespace lfres {

namespace {

// One level of pairwise combining; the unpaired tail node is promoted
// unchanged (copied: it stays part of the stored lower level).
template <class T, class Combine>
std::vector<T> build_level(const std::vector<T>& cur, const Combine& cmb, int threads) {
  const std::size_t pairs = cur.size() / 2;
  std::vector<T> next(pairs + (cur.size() & 1));
  parallel_for(pairs, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) next[i] = cmb(cur[2 * i], cur[2 * i + 1]);
  });
  if (cur.size() & 1) next.back() = cur.back();
  return next;
}

template <class Tree, class T, class Combine>
Tree build_tree(std::vector<T> leaves, const Combine& cmb, int threads) {
  if (leaves.empty()) throw std::invalid_argument("product_tree: empty input");
  Tree tree;
  tree.levels.push_back(std::move(leaves));
  while (tree.levels.back().size() > 1)
    tree.levels.push_back(build_level(tree.levels.back(), cmb, threads));
  std::reverse(tree.levels.begin(), tree.levels.end());
  return tree;
}

void check_modulus(const mpz_class& m) {
  if (mpz_sgn(m.get_mpz_t()) == 0)
    throw std::invalid_argument("remainder_walk: zero modulus in tree");
}

// Shared top-down walk; Reduce(value, modulus) -> reduced value.
template <class V, class Reduce>
std::vector<V> walk(const V& value, const ProductTree& moduli, const Reduce& red,
                    int threads) {
  check_modulus(moduli.root());
  std::vector<V> cur;
  cur.push_back(red(value, moduli.root()));
  for (std::size_t lvl = 1; lvl < moduli.levels.size(); ++lvl) {
    const auto& mods = moduli.levels[lvl];
    std::vector<V> next(mods.size());
    parallel_for(mods.size() / 2, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        check_modulus(mods[2 * j]);
        check_modulus(mods[2 * j + 1]);
        next[2 * j] = red(cur[j], mods[2 * j]);
        next[2 * j + 1] = red(cur[j], mods[2 * j + 1]);
      }
    });
    if (mods.size() & 1)  // promoted node: same modulus, value carries over
      next.back() = std::move(cur.back());
    cur = std::move(next);
  }
  return cur;
}

MatPair range_product(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t n = hi - lo + 1;
  if (n <= 32) {
    MatPair acc;
    mpz_set_ui(acc.a.get_mpz_t(), lo);
    mpz_set_ui(acc.b.get_mpz_t(), 1);
    for (std::uint64_t k = lo + 1; k <= hi; ++k) {
      // combine with C_k = (k, 1): b += a, a *= k
      mpz_add(acc.b.get_mpz_t(), acc.b.get_mpz_t(), acc.a.get_mpz_t());
      mpz_mul_ui(acc.a.get_mpz_t(), acc.a.get_mpz_t(), k);
    }
    return acc;
  }
  const std::uint64_t mid = lo + n / 2;
  MatPair left = range_product(lo, mid - 1);
  combine_inplace(left, range_product(mid, hi));
  return left;
}

}  // namespace

ProductTree product_tree(std::vector<mpz_class> leaves, int threads) {
  for (const auto& leaf : leaves)
    if (mpz_sgn(leaf.get_mpz_t()) <= 0)
      throw std::invalid_argument("product_tree: leaves must be positive");
  return build_tree<ProductTree>(
      std::move(leaves),
      [](const mpz_class& x, const mpz_class& y) { return mpz_class(x * y); }, threads);
}

ProductTree product_tree(const std::vector<std::uint64_t>& leaves, int threads) {
  std::vector<mpz_class> z(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i)
    mpz_set_ui(z[i].get_mpz_t(), leaves[i]);
  return product_tree(std::move(z), threads);
}

MatProductTree mat_product_tree(std::vector<MatPair> leaves, int threads) {
  return build_tree<MatProductTree>(
      std::move(leaves),
      [](const MatPair& x, const MatPair& y) { return combine(x, y); }, threads);
}

MatPair mat_product_range(std::uint64_t k_lo, std::uint64_t k_hi, int threads) {
  if (k_lo == 0) throw std::invalid_argument("mat_product_range: k_lo must be >= 1");
  if (k_lo > k_hi) return mat_identity();
  threads = resolve_threads(threads);
  const std::uint64_t n = k_hi - k_lo + 1;
  if (threads <= 1 || n < 4096) return range_product(k_lo, k_hi);

  const std::uint64_t chunk = n / static_cast<std::uint64_t>(threads);
  std::vector<MatPair> parts(static_cast<std::size_t>(threads));
  parallel_for(parts.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const std::uint64_t lo = k_lo + i * chunk;
      const std::uint64_t hi = (i + 1 == parts.size()) ? k_hi : lo + chunk - 1;
      parts[i] = range_product(lo, hi);
    }
  });
  MatPair acc = std::move(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) combine_inplace(acc, parts[i]);
  return acc;
}

std::vector<mpz_class> remainder_walk(const mpz_class& value, const ProductTree& moduli,
                                      int threads) {
  return walk(
      value, moduli,
      [](const mpz_class& v, const mpz_class& m) {
        mpz_class r;
        mpz_mod(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
        return r;
      },
      threads);
}

std::vector<MatPair> remainder_walk(const MatPair& value, const ProductTree& moduli,
                                    int threads) {
  return walk(
      value, moduli, [](const MatPair& v, const mpz_class& m) { return reduce(v, m); },
      threads);
}

}  // namespace lfres
