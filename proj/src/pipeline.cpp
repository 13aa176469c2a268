/**
 * @file src/pipeline.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lfres/bigprod.hpp"
#include "lfres/parallel.hpp"
#include "lfres/primes.hpp"

namespace lfres {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

template <typename T>
const T* sorted_find(const std::vector<std::vector<std::pair<u64, T>>>& levels, int i,
                     u64 j) {
  if (i < 0 || static_cast<std::size_t>(i) >= levels.size()) return nullptr;
  const auto& level = levels[i];
  const auto it = std::lower_bound(
      level.begin(), level.end(), j,
      [](const std::pair<u64, T>& e, u64 key) { return e.first < key; });
  if (it == level.end() || it->first != j) return nullptr;
  return &it->second;
}

}  // namespace

int tree_height(u64 m, u64 n) {
  if (n <= m) throw std::invalid_argument("tree_height: interval must satisfy n > m");
  return std::bit_width(n - m - 1);
}

Segment segment(u64 m, u64 n, int i, u64 j) {
  const int h = tree_height(m, n);
  if (i < 0 || i > h) throw std::invalid_argument("segment: level outside [0, h]");
  if (i < 64 && j >= (u64{1} << i))
    throw std::invalid_argument("segment: index must satisfy j < 2^i");
  const u64 d = n - m;
  const auto bound = [&](u64 idx) {
    return m + static_cast<u64>((static_cast<u128>(idx) * d) >> i);
  };
  Segment s;
  s.m = m;
  s.n = n;
  s.i = i;
  s.j = j;
  s.lo = bound(j);
  s.hi = bound(j + 1);
  return s;
}

const mpz_class& SegmentModuli::root() const {
  if (empty()) throw std::logic_error("segment moduli: interval holds no prime");
  return levels.front().front().second;
}

const mpz_class* SegmentModuli::find(int i, u64 j) const {
  return sorted_find(levels, i, j);
}

SegmentModuli phase1_moduli(u64 m, u64 n, int threads) {
  if (m < 2 || n <= m)
    throw std::invalid_argument("phase1_moduli: interval must satisfy n > m >= 2");
  SegmentModuli out;
  out.m = m;
  out.n = n;
  out.height = tree_height(m, n);
  out.levels.assign(out.height + 1, {});
  const PrimeList found = primes_in(m, n);
  if (found.primes.empty()) return out;

  const u64 d = n - m;
  auto& leaves = out.levels[out.height];
  leaves.reserve(found.primes.size());
  for (const u64 p : found.primes) {
    // p lies in leaf j exactly when j < (p-m)·2^h / d <= j+1.
    const u128 scaled = static_cast<u128>(p - m) << out.height;
    const u64 j = static_cast<u64>((scaled + d - 1) / d) - 1;
    leaves.emplace_back(j, mpz_class(static_cast<unsigned long>(p)));
  }

  for (int i = out.height; i > 0; --i) {
    const auto& child = out.levels[i];
    auto& parent = out.levels[i - 1];
    struct Merge {
      u64 j;
      std::size_t first;
      bool pair;
    };
    std::vector<Merge> merges;
    merges.reserve(child.size());
    for (std::size_t t = 0; t < child.size();) {
      const u64 pj = child[t].first >> 1;
      const bool pair = t + 1 < child.size() && (child[t + 1].first >> 1) == pj;
      merges.push_back({pj, t, pair});
      t += pair ? 2 : 1;
    }
    parent.resize(merges.size());
    parallel_for(merges.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        parent[k].first = merges[k].j;
        if (merges[k].pair)
          parent[k].second = child[merges[k].first].second * child[merges[k].first + 1].second;
        else
          parent[k].second = child[merges[k].first].second;
      }
    });
  }
  return out;
}

MatPair phase2_prefix(u64 m, const mpz_class& p00, Checkpoint& checkpoint, int threads) {
  if (checkpoint.m > m)
    throw CheckpointError("phase2: checkpoint frontier is ahead of the requested prefix");
  checkpoint.extend_to(m, threads);
  return checkpoint.fold_mod(p00, threads);
}

const MatPair* BlockMap::find_own(int i, u64 j) const { return sorted_find(own, i, j); }
const MatPair* BlockMap::find_carry(int i, u64 j) const { return sorted_find(carry, i, j); }

namespace {

struct Phase3Dfs {
  const SegmentModuli& moduli;
  BlockMap& out;
  int threads;
  int h;

  MatPair run(int i, u64 j) const {
    const Segment seg = segment(moduli.m, moduli.n, i, j);
    if (seg.empty()) return mat_identity();
    const mpz_class* p = moduli.find(i, j);
    MatPair a;
    if (p == nullptr) {
      // No prime anywhere below: nothing to store inside, one range product.
      a = mat_product_range(seg.lo + 1, seg.hi, threads);
    } else if (i == h) {
      a = c_of(seg.hi);
    } else {
      a = run(i + 1, 2 * j);
      const MatPair right = run(i + 1, 2 * j + 1);
      combine_inplace(a, right);
    }
    if (p != nullptr) out.own[i].emplace_back(j, reduce(a, *p));
    if ((j & 1) == 0) {
      if (const mpz_class* sibling = moduli.find(i, j + 1))
        out.carry[i].emplace_back(j, reduce(a, *sibling));
    }
    return a;
  }
};

}  // namespace

BlockMap phase3_blocks(u64 m, u64 n, const SegmentModuli& moduli, int threads) {
  if (moduli.m != m || moduli.n != n)
    throw std::invalid_argument("phase3_blocks: moduli were built for a different interval");
  BlockMap out;
  const int h = tree_height(m, n);
  out.own.assign(h + 1, {});
  out.carry.assign(h + 1, {});
  if (moduli.empty()) return out;
  const Phase3Dfs dfs{moduli, out, threads, h};
  dfs.run(0, 0);
  return out;
}

namespace {

struct Phase4Dfs {
  const BlockMap& blocks;
  const SegmentModuli& moduli;
  DescentResult& out;
  int h;
  // Carries per level are both emitted and consumed in ascending-j order,
  // so a cursor replaces repeated binary searches.
  std::vector<std::size_t> cursor;

  const MatPair* next_carry(int i, u64 j) {
    const auto& level = blocks.carry[i];
    std::size_t& at = cursor[i];
    while (at < level.size() && level[at].first < j) ++at;
    if (at < level.size() && level[at].first == j) return &level[at++].second;
    return nullptr;
  }

  void run(int i, u64 j, MatPair r) {
    if (i == h) {
      const Segment seg = segment(moduli.m, moduli.n, i, j);
      const mpz_class* p = moduli.find(i, j);
      if (p == nullptr || seg.width() != 1 ||
          mpz_cmp_ui(p->get_mpz_t(), seg.hi) != 0)
        throw std::logic_error("phase4: leaf modulus does not match its segment");
      const u64 prime = seg.hi;
      // r = M_{p-1} mod p; the in-leaf multiplication by C_p puts
      // !p ≡ a + b in the (1,2)-entry.
      const u64 av = mpz_get_ui(r.a.get_mpz_t());
      const u64 bv = mpz_get_ui(r.b.get_mpz_t());
      const u64 residue = av >= prime - bv ? av - (prime - bv) : av + bv;
      out.records.push_back({prime, balance(residue, prime)});
      if (residue == 0 && (prime & 1) != 0) out.counterexample = true;
      return;
    }
    const int ci = i + 1;
    const u64 lj = 2 * j;
    const mpz_class* pl = moduli.find(ci, lj);
    const mpz_class* pr = moduli.find(ci, lj + 1);
    if (pl != nullptr) run(ci, lj, reduce(r, *pl));
    if (pr != nullptr) {
      MatPair rr = reduce(r, *pr);
      // Absent carry means the left sibling's block product is the identity.
      if (const MatPair* c = next_carry(ci, lj)) combine_mod_inplace(rr, *c, *pr);
      run(ci, lj + 1, std::move(rr));
    }
  }
};

}  // namespace

DescentResult phase4_descend(const MatPair& r00, const BlockMap& blocks,
                             const SegmentModuli& moduli) {
  DescentResult out;
  if (moduli.empty()) return out;
  Phase4Dfs dfs{blocks, moduli, out, moduli.height,
                std::vector<std::size_t>(moduli.height + 1, 0)};
  dfs.run(0, 0, r00);
  return out;
}

ScanOutcome scan_interval(u64 m, u64 n, CheckpointStore* store,
                          const ScanOptions& options, const ChunkSink& sink) {
  if (m < 2 || n <= m)
    throw std::invalid_argument("scan_interval: interval must satisfy 2 <= m < n");
  if (options.block_budget == 0)
    throw std::invalid_argument("scan_interval: block_budget must be positive");
  const int threads = resolve_threads(options.threads);

  ScanOutcome out;
  Checkpoint frontier;
  if (store != nullptr) {
    if (auto stored = store->load()) {
      if (stored->m <= m) {
        frontier = std::move(*stored);
        out.resumed_from = frontier.m;
      } else {
        out.ignored_incompatible = true;
      }
    }
  }

  for (u64 c0 = m; c0 < n;) {
    const u64 c1 = std::min(n, c0 + options.block_budget);
    std::vector<ResidueRecord> chunk;
    const SegmentModuli moduli = phase1_moduli(c0, c1, threads);
    if (!moduli.empty()) {
      const MatPair r00 = phase2_prefix(c0, moduli.root(), frontier, threads);
      const BlockMap blocks = phase3_blocks(c0, c1, moduli, threads);
      DescentResult descent = phase4_descend(r00, blocks, moduli);
      out.counterexample = out.counterexample || descent.counterexample;
      chunk = std::move(descent.records);
    }
    frontier.extend_to(c1, threads);
    if (store != nullptr) store->save(frontier);
    out.records.insert(out.records.end(), chunk.begin(), chunk.end());
    if (sink) sink(chunk, frontier);
    c0 = c1;
  }
  out.checkpoint = std::move(frontier);
  return out;
}

void write_residue_csv_header(std::ostream& out) { out << "p,residue\n"; }

void write_residue_rows(std::ostream& out, const std::vector<ResidueRecord>& records) {
  for (const auto& rec : records) out << rec.p << ',' << rec.residue.value << '\n';
}

void write_residue_csv(std::ostream& out, const std::vector<ResidueRecord>& records) {
  write_residue_csv_header(out);
  write_residue_rows(out, records);
}

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<ResidueRecord> read_residue_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("residue csv: empty input");
  strip_cr(line);
  if (line != "p,residue") throw std::runtime_error("residue csv: bad header");
  std::vector<ResidueRecord> out;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const char* begin = line.data();
    const char* end = begin + line.size();
    ResidueRecord rec;
    auto [after_p, ec_p] = std::from_chars(begin, end, rec.p);
    if (ec_p != std::errc{} || after_p == end || *after_p != ',')
      throw std::runtime_error("residue csv: malformed row: " + line);
    auto [after_v, ec_v] = std::from_chars(after_p + 1, end, rec.residue.value);
    if (ec_v != std::errc{} || after_v != end)
      throw std::runtime_error("residue csv: malformed row: " + line);
    rec.residue.p = rec.p;
    out.push_back(rec);
  }
  return out;
}

}  // namespace lfres
