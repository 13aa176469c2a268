/**
 * @file lfres/pipeline.hpp
 * @copyright Apache License 2.0
 *
 * Four-phase interval scan producing !p mod p for every prime p in (m, n]:
 *   1. segment-tree moduli P_{i,j} (products of the primes in each segment),
 *   2. prefix matrix M_m mod P_{0,0} from the checkpoint frontier,
 *   3. reduced block products A_{i,j} of the C_k matrices per segment,
 *   4. top-down accumulating remainder descent to the per-prime leaves.
 */
#ifndef LFRES_PIPELINE_HPP
#define LFRES_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "lfres/checkpoint.hpp"
#include "lfres/matpair.hpp"

namespace lfres {

// Dyadic segment S_{i,j} = (lo, hi] of the tree over (m, n]. Level 0 is the
// whole interval; at level h = ceil(log2(n-m)) every segment holds at most
// one integer. For fixed i, the 2^i segments partition (m, n] exactly.
struct Segment {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  int i = 0;            // level
  std::uint64_t j = 0;  // index within the level, < 2^i
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  std::uint64_t width() const { return hi - lo; }
  bool empty() const { return hi == lo; }
  bool operator==(const Segment&) const = default;
};

// ceil(log2(n - m)); 0 when the interval holds a single integer.
int tree_height(std::uint64_t m, std::uint64_t n);

// lo = m + floor(j(n-m)/2^i), hi = m + floor((j+1)(n-m)/2^i). Rejects
// i outside [0, h] and j >= 2^i.
Segment segment(std::uint64_t m, std::uint64_t n, int i, std::uint64_t j);

// Sparse segment-tree moduli: levels[i] holds (j, P_{i,j}) sorted by j,
// only for segments containing at least one prime. Absent nodes have the
// empty-product modulus 1.
struct SegmentModuli {
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  int height = 0;
  std::vector<std::vector<std::pair<std::uint64_t, mpz_class>>> levels;

  bool empty() const { return levels.empty() || levels.front().empty(); }
  // P_{0,0}, the product of every prime in (m, n]. Throws when empty.
  const mpz_class& root() const;
  // nullptr when the segment holds no prime (P_{i,j} = 1).
  const mpz_class* find(int i, std::uint64_t j) const;
};

// Phase 1: sieve (m, n] and build every P_{i,j} with a product tree.
// Requires n > m >= 2.
SegmentModuli phase1_moduli(std::uint64_t m, std::uint64_t n, int threads = 1);

// Phase 2: M_m mod p00. Extends the frontier from checkpoint.m to m
// (multiplying only C_{checkpoint.m + 1} ... C_m), leaving the extended
// frontier in `checkpoint`, then folds it under reduction. Pass a
// default-constructed Checkpoint to start from scratch. Rejects
// checkpoint.m > m and a corrupt frontier.
MatPair phase2_prefix(std::uint64_t m, const mpz_class& p00, Checkpoint& checkpoint,
                      int threads = 1);

// Phase 3 output. `own` holds A_{i,j} mod P_{i,j} for every node with
// P_{i,j} > 1, per level, sorted by j. `carry` holds A_{i,j} mod P_{i,j+1}
// for even j whenever the right sibling has primes: the descent's odd-child
// step multiplies by the left sibling's block product, and since sibling
// moduli are coprime, only a reduction taken mod the sibling while the
// unreduced product is still in hand can supply it.
struct BlockMap {
  std::vector<std::vector<std::pair<std::uint64_t, MatPair>>> own;
  std::vector<std::vector<std::pair<std::uint64_t, MatPair>>> carry;

  const MatPair* find_own(int i, std::uint64_t j) const;
  const MatPair* find_carry(int i, std::uint64_t j) const;
};

// Phase 3: one post-order pass forming each unreduced block product
// A_{i,j} = C_{lo+1} ... C_{hi} exactly once; reductions are stored, the
// unreduced values stay transient on the recursion path. Subtrees without
// any prime are collapsed into a single range product.
BlockMap phase3_blocks(std::uint64_t m, std::uint64_t n, const SegmentModuli& moduli,
                       int threads = 1);

struct ResidueRecord {
  std::uint64_t p = 0;
  BalancedResidue residue;

  bool operator==(const ResidueRecord&) const = default;
};

struct DescentResult {
  std::vector<ResidueRecord> records;  // ascending p
  // An odd prime p with !p ≡ 0 (mod p) — would disprove Kurepa's conjecture.
  bool counterexample = false;
};

// Phase 4: from R_{0,0} = M_m mod P_{0,0} descend with
//   R_{i+1,2j}   = R_{i,j} mod P_{i+1,2j}
//   R_{i+1,2j+1} = (R_{i,j} · A_{i+1,2j}) mod P_{i+1,2j+1}
// so a leaf for prime p holds R = M_{p-1} mod p; the in-leaf step multiplies
// C_p, whose (1,2)-entry is r_p = (a + b) mod p. Throws std::logic_error
// when a leaf modulus does not match its single-candidate segment.
DescentResult phase4_descend(const MatPair& r00, const BlockMap& blocks,
                             const SegmentModuli& moduli);

struct ScanOptions {
  // Sub-interval width: larger requests are split into consecutive chunks
  // of this many integers so Phase 3 trees stay within memory.
  std::uint64_t block_budget = std::uint64_t{1} << 22;
  int threads = 0;  // 0 = hardware concurrency
};

struct ScanOutcome {
  std::vector<ResidueRecord> records;  // ascending p
  Checkpoint checkpoint;               // frontier extended to n
  bool counterexample = false;
  // Resume bookkeeping: the frontier coverage a stored checkpoint supplied,
  // or 0 when starting fresh; a stored frontier past m is left unused.
  std::uint64_t resumed_from = 0;
  bool ignored_incompatible = false;
};

// Called after each completed sub-interval with the records of that chunk
// and the frontier as of the chunk's end.
using ChunkSink =
    std::function<void(const std::vector<ResidueRecord>&, const Checkpoint&)>;

// Runs phases 1-4 over (m, n] in block_budget-sized chunks, threading the
// checkpoint frontier through and persisting it to `store` (when given)
// after every chunk. Output is bit-identical regardless of chunk splits.
// Requires 2 <= m < n.
ScanOutcome scan_interval(std::uint64_t m, std::uint64_t n,
                          CheckpointStore* store = nullptr,
                          const ScanOptions& options = {},
                          const ChunkSink& sink = nullptr);

// CSV surface: header "p,residue", one "p,balanced-value" row per record,
// LF line ends, rows ascending by p.
void write_residue_csv_header(std::ostream& out);
void write_residue_rows(std::ostream& out, const std::vector<ResidueRecord>& records);
void write_residue_csv(std::ostream& out, const std::vector<ResidueRecord>& records);
std::vector<ResidueRecord> read_residue_csv(std::istream& in);

}  // namespace lfres

#endif  // LFRES_PIPELINE_HPP
