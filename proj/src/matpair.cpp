/**
 * @file src/matpair.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/matpair.hpp"

#include <stdexcept>

namespace lfres {

MatPair mat_identity() { return MatPair{1, 0}; }

MatPair c_of(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("c_of: k must be >= 1");
  MatPair m;
  mpz_set_ui(m.a.get_mpz_t(), k);
  mpz_set_ui(m.b.get_mpz_t(), 1);
  return m;
}

MatPair combine(const MatPair& x, const MatPair& y) {
  MatPair r;
  r.a = x.a * y.a;
  r.b = x.a * y.b + x.b;
  return r;
}

void combine_inplace(MatPair& x, const MatPair& y) {
  // b must be updated first; it reads the old a.
  mpz_addmul(x.b.get_mpz_t(), x.a.get_mpz_t(), y.b.get_mpz_t());
  x.a *= y.a;
}

MatPair reduce(const MatPair& x, const mpz_class& modulus) {
  if (mpz_sgn(modulus.get_mpz_t()) <= 0)
    throw std::invalid_argument("reduce: modulus must be positive");
  MatPair r;
  mpz_mod(r.a.get_mpz_t(), x.a.get_mpz_t(), modulus.get_mpz_t());
  mpz_mod(r.b.get_mpz_t(), x.b.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

void reduce_inplace(MatPair& x, const mpz_class& modulus) {
  if (mpz_sgn(modulus.get_mpz_t()) <= 0)
    throw std::invalid_argument("reduce: modulus must be positive");
  mpz_mod(x.a.get_mpz_t(), x.a.get_mpz_t(), modulus.get_mpz_t());
  mpz_mod(x.b.get_mpz_t(), x.b.get_mpz_t(), modulus.get_mpz_t());
}

void combine_mod_inplace(MatPair& x, const MatPair& y, const mpz_class& modulus) {
  combine_inplace(x, y);
  reduce_inplace(x, modulus);
}

std::uint64_t left_factorial_oracle(std::uint64_t p) {
  if (p < 2) throw std::invalid_argument("left_factorial_oracle: p must be >= 2");
  std::uint64_t acc = 0;  // sum of k! for k < current
  std::uint64_t fact = 1 % p;  // (k-1)! mod p entering step k
  for (std::uint64_t k = 1; k <= p; ++k) {
    acc += fact;
    if (acc >= p) acc -= p;
    fact = static_cast<std::uint64_t>(static_cast<unsigned __int128>(fact) * k % p);
  }
  return acc;
}

BalancedResidue balance(std::uint64_t r, std::uint64_t p) {
  if (p < 2) throw std::invalid_argument("balance: p must be >= 2");
  if (r >= p) throw std::invalid_argument("balance: residue out of range");
  BalancedResidue out;
  out.p = p;
  if (r > p / 2)  // representative lies in (-p/2, p/2]
    out.value = -static_cast<std::int64_t>(p - r);
  else
    out.value = static_cast<std::int64_t>(r);
  return out;
}

}  // namespace lfres
