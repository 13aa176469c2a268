/**
 * @file src/polymod.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/polymod.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <stdexcept>

#include "lfres/detail/modarith.hpp"
#include "lfres/parallel.hpp"

namespace lfres {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr u64 kMaxModulus = u64{1} << 62;
constexpr std::size_t kSchoolbookCutoff = 16;

void check_modulus(u64 p) {
  if (p < 2 || p >= kMaxModulus)
    throw std::invalid_argument("polymod: modulus must satisfy 2 <= p < 2^62");
}

void check_same(const PolyModP& f, const PolyModP& g) {
  check_modulus(f.p);
  if (f.p != g.p) throw std::invalid_argument("polymod: modulus mismatch");
}

void strip(std::vector<u64>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

PolyModP schoolbook_mul(const PolyModP& f, const PolyModP& g) {
  const u64 p = f.p;
  PolyModP out;
  out.p = p;
  out.coeff.assign(f.coeff.size() + g.coeff.size() - 1, 0);
  const bool f_shorter = f.coeff.size() <= g.coeff.size();
  const auto& s = f_shorter ? f.coeff : g.coeff;  // short side
  const auto& l = f_shorter ? g.coeff : f.coeff;
  for (std::size_t i = 0; i < out.coeff.size(); ++i) {
    // Accumulates at most kSchoolbookCutoff terms below 2^124 each, which
    // stays under 2^128 exactly because the cutoff is 16 and p < 2^62.
    u128 acc = 0;
    const std::size_t k_lo = i + 1 >= s.size() ? i + 1 - s.size() : 0;
    const std::size_t k_hi = std::min(i, l.size() - 1);
    for (std::size_t k = k_lo; k <= k_hi; ++k)
      acc += static_cast<u128>(l[k]) * s[i - k];
    out.coeff[i] = static_cast<u64>(acc % p);
  }
  strip(out.coeff);
  return out;
}

// Kronecker substitution: coefficient i occupies limbs [i*w, (i+1)*w) of a
// big integer; one mpz_mul then carries the whole convolution exactly as
// long as w*64 bits hold the largest possible output coefficient.
PolyModP kronecker_mul(const PolyModP& f, const PolyModP& g) {
  const u64 p = f.p;
  const std::size_t min_len = std::min(f.coeff.size(), g.coeff.size());

  mpz_class bound = mpz_class(static_cast<unsigned long>(p - 1));
  bound *= bound;
  bound *= static_cast<unsigned long>(min_len);
  const std::size_t w = (mpz_sizeinbase(bound.get_mpz_t(), 2) + 63) / 64;

  const auto pack = [&](const std::vector<u64>& c) {
    std::vector<mp_limb_t> limbs(c.size() * w, 0);
    for (std::size_t i = 0; i < c.size(); ++i) limbs[i * w] = c[i];
    mpz_class z;
    mpz_import(z.get_mpz_t(), limbs.size(), -1, sizeof(mp_limb_t), 0, 0, limbs.data());
    return z;
  };

  const mpz_class prod = pack(f.coeff) * pack(g.coeff);

  PolyModP out;
  out.p = p;
  const std::size_t out_len = f.coeff.size() + g.coeff.size() - 1;
  out.coeff.assign(out_len, 0);
  const std::size_t limb_count = mpz_size(prod.get_mpz_t());
  for (std::size_t i = 0; i < out_len; ++i) {
    const std::size_t base = i * w;
    if (base >= limb_count) break;
    const std::size_t top = std::min(limb_count, base + w);
    u128 rem = 0;
    for (std::size_t t = top; t > base; --t) {
      rem = (rem << 64) | mpz_getlimbn(prod.get_mpz_t(), static_cast<mp_size_t>(t - 1));
      rem %= p;
    }
    out.coeff[i] = static_cast<u64>(rem);
  }
  strip(out.coeff);
  return out;
}

PolyModP truncated(PolyModP f, std::size_t k) {
  if (f.coeff.size() > k) f.coeff.resize(k);
  strip(f.coeff);
  return f;
}

PolyModP reversed(const PolyModP& f, std::size_t len) {
  // f interpreted as exactly `len` coefficients (zero-padded), reversed.
  PolyModP out;
  out.p = f.p;
  out.coeff.assign(len, 0);
  for (std::size_t i = 0; i < f.coeff.size() && i < len; ++i)
    out.coeff[len - 1 - i] = f.coeff[i];
  strip(out.coeff);
  return out;
}

bool is_monic(const PolyModP& g) { return !g.coeff.empty() && g.coeff.back() == 1; }

// Remainder using a precomputed series inverse of the reversed divisor
// (at least deg f - deg g + 1 coefficients of it).
PolyModP rem_with_inverse(const PolyModP& f, const PolyModP& g, const PolyModP& inv_rev_g) {
  const auto n = static_cast<std::size_t>(f.degree());
  const auto m = static_cast<std::size_t>(g.degree());
  if (f.coeff.size() <= m) return f;
  const std::size_t q_len = n - m + 1;
  const PolyModP q_rev = truncated(polymul(reversed(f, n + 1), inv_rev_g), q_len);
  const PolyModP q = reversed(q_rev, q_len);
  PolyModP r = poly_sub(f, polymul(q, g));
  // Exact division guarantees deg r < m; resize defensively all the same.
  return truncated(std::move(r), m);
}

// Subproduct tree over the evaluation points. levels[0] holds chunk
// polynomials of up to kEvalBase points each; each level above multiplies
// neighbours, promoting an unpaired trailing node by copy.
constexpr std::size_t kEvalBase = 16;

struct EvalTree {
  u64 p = 0;
  std::vector<u64> points;
  std::vector<std::vector<PolyModP>> levels;
};

EvalTree build_eval_tree(u64 p, std::vector<u64> points, int threads) {
  EvalTree tree;
  tree.p = p;
  tree.points = std::move(points);
  const std::size_t chunks = (tree.points.size() + kEvalBase - 1) / kEvalBase;
  auto& base = tree.levels.emplace_back(chunks);
  parallel_for(chunks, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      PolyModP node;
      node.p = p;
      node.coeff = {1};
      const std::size_t stop = std::min(tree.points.size(), (c + 1) * kEvalBase);
      for (std::size_t t = c * kEvalBase; t < stop; ++t) {
        // node *= (x - x_t), maintained in place.
        const u64 neg = tree.points[t] == 0 ? 0 : p - tree.points[t];
        node.coeff.push_back(0);
        for (std::size_t d = node.coeff.size() - 1; d > 0; --d)
          node.coeff[d] = detail::addmod_u64(
              node.coeff[d - 1], detail::mulmod_u64(node.coeff[d], neg, p), p);
        node.coeff[0] = detail::mulmod_u64(node.coeff[0], neg, p);
      }
      base[c] = std::move(node);
    }
  });
  while (tree.levels.back().size() > 1) {
    const auto& child = tree.levels.back();
    std::vector<PolyModP> next((child.size() + 1) / 2);
    parallel_for(next.size(), threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        if (2 * k + 1 < child.size())
          next[k] = polymul(child[2 * k], child[2 * k + 1]);
        else
          next[k] = child[2 * k];
      }
    });
    tree.levels.push_back(std::move(next));
  }
  return tree;
}

struct EvalDescent {
  const EvalTree& tree;
  std::vector<std::vector<u64>> out;

  void horner_chunk(std::size_t chunk, const std::vector<PolyModP>& rems) {
    const std::size_t lo = chunk * kEvalBase;
    const std::size_t hi = std::min(tree.points.size(), lo + kEvalBase);
    for (std::size_t f = 0; f < rems.size(); ++f)
      for (std::size_t t = lo; t < hi; ++t)
        out[f][t] = poly_eval(rems[f], tree.points[t]);
  }

  // rems reduced mod the divisor, sharing one series inverse across inputs.
  static std::vector<PolyModP> reduce_all(const std::vector<PolyModP>& rems,
                                          const PolyModP& divisor) {
    std::int64_t top = -1;
    for (const auto& r : rems) top = std::max(top, r.degree());
    std::vector<PolyModP> next = rems;
    if (top >= divisor.degree()) {
      const auto q_len = static_cast<std::size_t>(top - divisor.degree() + 1);
      const PolyModP inv =
          inv_series(reversed(divisor, divisor.coeff.size()), q_len);
      for (auto& r : next)
        if (r.degree() >= divisor.degree()) r = rem_with_inverse(r, divisor, inv);
    }
    return next;
  }

  void run(std::size_t level, std::size_t idx, std::vector<PolyModP> rems) {
    if (level == 0) {
      horner_chunk(idx, rems);
      return;
    }
    const auto& child = tree.levels[level - 1];
    const std::size_t c0 = 2 * idx;
    const std::size_t c1 = c0 + 1;
    if (c1 >= child.size()) {
      // Promoted node: identical polynomial below, remainders carry over.
      run(level - 1, c0, std::move(rems));
      return;
    }
    run(level - 1, c0, reduce_all(rems, child[c0]));
    run(level - 1, c1, reduce_all(rems, child[c1]));
  }
};

std::vector<std::vector<u64>> eval_many(const std::vector<const PolyModP*>& inputs,
                                        const std::vector<u64>& points, u64 p,
                                        int threads) {
  check_modulus(p);
  for (const auto* f : inputs)
    if (f->p != p) throw std::invalid_argument("multipoint_eval: modulus mismatch");
  std::vector<std::vector<u64>> out(inputs.size(),
                                    std::vector<u64>(points.size(), 0));
  if (points.empty()) return out;

  std::vector<u64> reduced(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) reduced[i] = points[i] % p;

  // Quadratic Horner wins outright on small inputs.
  if (points.size() <= 2 * kEvalBase) {
    for (std::size_t f = 0; f < inputs.size(); ++f)
      for (std::size_t i = 0; i < reduced.size(); ++i)
        out[f][i] = poly_eval(*inputs[f], reduced[i]);
    return out;
  }

  const EvalTree tree = build_eval_tree(p, std::move(reduced), threads);
  EvalDescent descent{tree, std::move(out)};
  const PolyModP& root = tree.levels.back().front();
  std::vector<PolyModP> rems;
  rems.reserve(inputs.size());
  for (const auto* f : inputs) rems.push_back(poly_rem_monic(*f, root));
  descent.run(tree.levels.size() - 1, 0, std::move(rems));
  return std::move(descent.out);
}

}  // namespace

PolyModP poly_from(u64 p, std::vector<u64> coefficients) {
  check_modulus(p);
  PolyModP out;
  out.p = p;
  out.coeff = std::move(coefficients);
  for (auto& c : out.coeff) c %= p;
  strip(out.coeff);
  return out;
}

PolyModP poly_add(const PolyModP& f, const PolyModP& g) {
  check_same(f, g);
  PolyModP out;
  out.p = f.p;
  out.coeff.resize(std::max(f.coeff.size(), g.coeff.size()), 0);
  for (std::size_t i = 0; i < out.coeff.size(); ++i) {
    const u64 a = i < f.coeff.size() ? f.coeff[i] : 0;
    const u64 b = i < g.coeff.size() ? g.coeff[i] : 0;
    out.coeff[i] = detail::addmod_u64(a, b, f.p);
  }
  strip(out.coeff);
  return out;
}

PolyModP poly_sub(const PolyModP& f, const PolyModP& g) {
  check_same(f, g);
  PolyModP out;
  out.p = f.p;
  out.coeff.resize(std::max(f.coeff.size(), g.coeff.size()), 0);
  for (std::size_t i = 0; i < out.coeff.size(); ++i) {
    const u64 a = i < f.coeff.size() ? f.coeff[i] : 0;
    const u64 b = i < g.coeff.size() ? g.coeff[i] : 0;
    out.coeff[i] = a >= b ? a - b : a + (f.p - b);
  }
  strip(out.coeff);
  return out;
}

PolyModP polymul(const PolyModP& f, const PolyModP& g) {
  check_same(f, g);
  if (f.zero() || g.zero()) return PolyModP{f.p, {}};
  if (std::min(f.coeff.size(), g.coeff.size()) <= kSchoolbookCutoff)
    return schoolbook_mul(f, g);
  return kronecker_mul(f, g);
}

u64 poly_eval(const PolyModP& f, u64 x) {
  check_modulus(f.p);
  u64 acc = 0;
  x %= f.p;
  for (std::size_t i = f.coeff.size(); i > 0; --i)
    acc = detail::addmod_u64(detail::mulmod_u64(acc, x, f.p), f.coeff[i - 1], f.p);
  return acc;
}

PolyModP inv_series(const PolyModP& h, std::size_t k) {
  check_modulus(h.p);
  if (h.coeff.empty() || h.coeff.front() != 1)
    throw std::invalid_argument("inv_series: constant term must be 1");
  PolyModP v;
  v.p = h.p;
  if (k == 0) return v;
  v.coeff = {1};
  std::size_t have = 1;
  PolyModP two;
  two.p = h.p;
  two.coeff = {2 % h.p};
  strip(two.coeff);  // p = 2: the constant 2 is the zero polynomial
  while (have < k) {
    have = std::min(2 * have, k);
    // v <- v(2 - h v) mod x^have
    PolyModP hv = truncated(polymul(truncated(h, have), v), have);
    PolyModP correction = poly_sub(two, hv);
    v = truncated(polymul(v, correction), have);
  }
  return truncated(std::move(v), k);
}

PolyModP poly_rem_monic(const PolyModP& f, const PolyModP& g) {
  check_same(f, g);
  if (g.degree() < 1 || !is_monic(g))
    throw std::invalid_argument("poly_rem_monic: divisor must be monic of degree >= 1");
  if (f.degree() < g.degree()) return f;
  const auto q_len = static_cast<std::size_t>(f.degree() - g.degree() + 1);
  const PolyModP inv = inv_series(reversed(g, g.coeff.size()), q_len);
  return rem_with_inverse(f, g, inv);
}

std::vector<u64> multipoint_eval(const PolyModP& f, const std::vector<u64>& points) {
  return eval_many({&f}, points, f.p, 1).front();
}

std::pair<std::vector<u64>, std::vector<u64>> multipoint_eval_pair(
    const PolyModP& fa, const PolyModP& fb, const std::vector<u64>& points,
    int threads) {
  auto both = eval_many({&fa, &fb}, points, fa.p, threads);
  return {std::move(both[0]), std::move(both[1])};
}

}  // namespace lfres
