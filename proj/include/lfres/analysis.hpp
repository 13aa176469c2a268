/**
 * @file lfres/analysis.hpp
 * @copyright Apache License 2.0
 *
 * Post-scan number theory: near-miss reporting for Kurepa's conjecture
 * (|r_p| below a threshold), the socialist-prime necessary condition and
 * its brute-force ground truth, and the heuristic predictors for how many
 * low residues an interval should contain.
 */
#ifndef LFRES_ANALYSIS_HPP
#define LFRES_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lfres/pipeline.hpp"

namespace lfres {

struct NearMissReport {
  std::uint64_t threshold = 0;      // the cut |r_p| < threshold
  std::vector<ResidueRecord> rows;  // qualifying records, ascending p
  std::size_t observed_count = 0;
  double expected_count = 0.0;      // heuristic over the records' span
  bool counterexample = false;      // an odd p with r_p = 0 appeared
};

// Filters |residue| < threshold out of a scan, attaching the heuristic
// expectation computed from the span [first prime, last prime] of the
// input. Requires threshold >= 1; records must be sorted by p.
NearMissReport kurepa_scan(const std::vector<ResidueRecord>& records,
                           std::uint64_t threshold);

// Necessary condition for p to be a socialist prime: (!p - 2)^2 ≡ 1
// (mod p), equivalently r_p ∈ {1, 3}. Defined for p > 5 only; the smaller
// primes are settled by socialist_bruteforce alone.
bool socialist_filter(std::uint64_t p, std::uint64_t r);

// Ground truth by definition: are the residues of 2!, 3!, ..., (p-1)!
// pairwise distinct mod p? O(p) time and space. Requires p >= 3.
bool socialist_bruteforce(std::uint64_t p);

// Expected number of primes p in (2^m_exp, 2^n_exp) with |r_p| < threshold,
// assuming !p mod p is uniform: (2*threshold - 1) * ln(n_exp / m_exp).
// Requires n_exp > m_exp > 0 and threshold >= 1.
double expected_low_residues(double m_exp, double n_exp, std::uint64_t threshold);

// Heuristic probability that a Kurepa counterexample exists in
// (2^m_exp, 2^n_exp): 1 - m_exp / n_exp. Requires n_exp >= m_exp > 0.
double counterexample_probability(double m_exp, double n_exp);

// Plain-text table (columns p, r_p) followed by the observed/expected
// summary, and a JSON rendering of the same report.
std::string near_miss_text(const NearMissReport& report);
std::string near_miss_json(const NearMissReport& report);

}  // namespace lfres

#endif  // LFRES_ANALYSIS_HPP
