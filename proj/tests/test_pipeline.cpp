/**
 * @file tests/test_pipeline.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lfres/bigprod.hpp"
#include "lfres/checkpoint.hpp"
#include "lfres/matpair.hpp"
#include "lfres/primes.hpp"

namespace {

using lfres::Checkpoint;
using lfres::MatPair;

namespace fs = std::filesystem;

// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() /
           ("lfres-test-" + tag + "-" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Balanced residue records straight from the O(p) oracle.
std::vector<lfres::ResidueRecord> oracle_records(std::uint64_t m, std::uint64_t n) {
  std::vector<lfres::ResidueRecord> out;
  for (std::uint64_t p : lfres::primes_in(m, n).primes) {
    out.push_back({p, lfres::balance(lfres::left_factorial_oracle(p), p)});
  }
  return out;
}

std::string csv_of(const std::vector<lfres::ResidueRecord>& records) {
  std::ostringstream out;
  lfres::write_residue_csv(out, records);
  return out.str();
}

}  // namespace

TEST_CASE("tree_height is ceil(log2(width))") {
  CHECK(lfres::tree_height(10, 11) == 0);
  CHECK(lfres::tree_height(10, 12) == 1);
  CHECK(lfres::tree_height(10, 13) == 2);
  CHECK(lfres::tree_height(10, 14) == 2);
  CHECK(lfres::tree_height(10, 15) == 3);
  CHECK(lfres::tree_height(0, std::uint64_t{1} << 32) == 32);
}

TEST_CASE("segment computes floor-split dyadic bounds") {
  // (10, 26], level 2, j = 1: lo = 10 + floor(1*16/4) = 14, hi = 10 + 8 = 18.
  const lfres::Segment s = lfres::segment(10, 26, 2, 1);
  CHECK(s.lo == 14);
  CHECK(s.hi == 18);

  const lfres::Segment root = lfres::segment(4, 8, 0, 0);
  CHECK(root.lo == 4);
  CHECK(root.hi == 8);

  // Odd width splits unevenly but exactly: (0,5] -> (0,2] and (2,5].
  CHECK(lfres::segment(0, 5, 1, 0).hi == 2);
  CHECK(lfres::segment(0, 5, 1, 1).lo == 2);
  CHECK(lfres::segment(0, 5, 1, 1).hi == 5);

  CHECK_THROWS_AS((void)lfres::segment(4, 8, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::segment(4, 8, 9, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::segment(8, 8, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::segment(9, 8, 0, 0), std::invalid_argument);
}

TEST_CASE("every level partitions the interval exactly") {
  for (std::uint64_t m : {std::uint64_t{0}, std::uint64_t{7}, std::uint64_t{1000}}) {
    for (std::uint64_t d = 1; d <= 300; ++d) {
      const std::uint64_t n = m + d;
      const int h = lfres::tree_height(m, n);
      for (int i = 0; i <= h; ++i) {
        std::uint64_t prev_hi = m;
        const std::uint64_t count = std::uint64_t{1} << i;
        for (std::uint64_t j = 0; j < count; ++j) {
          const lfres::Segment s = lfres::segment(m, n, i, j);
          REQUIRE(s.lo == prev_hi);   // segments meet with no gap or overlap
          REQUIRE(s.hi >= s.lo);
          if (i == h) REQUIRE(s.width() <= 1);  // leaves isolate integers
          prev_hi = s.hi;
        }
        REQUIRE(prev_hi == n);
      }
    }
  }
}

TEST_CASE("children cover their parent segment") {
  std::mt19937_64 rng(0x5E9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t m = rng() % 1000000;
    const std::uint64_t n = m + 2 + rng() % 100000;
    const int h = lfres::tree_height(m, n);
    const int i = static_cast<int>(rng() % h);
    const std::uint64_t j = rng() % (std::uint64_t{1} << i);
    const lfres::Segment parent = lfres::segment(m, n, i, j);
    const lfres::Segment left = lfres::segment(m, n, i + 1, 2 * j);
    const lfres::Segment right = lfres::segment(m, n, i + 1, 2 * j + 1);
    CHECK(left.lo == parent.lo);
    CHECK(left.hi == right.lo);
    CHECK(right.hi == parent.hi);
  }
}

TEST_CASE("phase1 builds the prime-product moduli") {
  SUBCASE("interval (4, 8]: primes 5, 7") {
    const lfres::SegmentModuli mod = lfres::phase1_moduli(4, 8);
    CHECK(mod.root() == 35);
    REQUIRE(mod.find(1, 0) != nullptr);
    CHECK(*mod.find(1, 0) == 5);  // (4, 6] holds 5
    REQUIRE(mod.find(1, 1) != nullptr);
    CHECK(*mod.find(1, 1) == 7);  // (6, 8] holds 7
    // Leaves: (4,5] holds 5, (6,7] holds 7, the other two are prime-free.
    REQUIRE(mod.find(2, 0) != nullptr);
    CHECK(*mod.find(2, 0) == 5);
    CHECK(mod.find(2, 1) == nullptr);
    REQUIRE(mod.find(2, 2) != nullptr);
    CHECK(*mod.find(2, 2) == 7);
    CHECK(mod.find(2, 3) == nullptr);
  }

  SUBCASE("interval (2, 10]: primes 3, 5, 7") {
    const lfres::SegmentModuli mod = lfres::phase1_moduli(2, 10);
    CHECK(mod.root() == 105);
  }

  SUBCASE("prime-free interval (24, 28]") {
    const lfres::SegmentModuli mod = lfres::phase1_moduli(24, 28);
    CHECK(mod.empty());
    CHECK(mod.find(0, 0) == nullptr);
    CHECK_THROWS_AS((void)mod.root(), std::logic_error);
  }

  SUBCASE("every node is the product of the primes in its segment") {
    const std::uint64_t m = 1000, n = 1800;
    const lfres::SegmentModuli mod = lfres::phase1_moduli(m, n);
    const int h = lfres::tree_height(m, n);
    for (int i = 0; i <= h; ++i) {
      for (std::uint64_t j = 0; j < (std::uint64_t{1} << i); ++j) {
        const lfres::Segment s = lfres::segment(m, n, i, j);
        mpz_class expected = 1;
        for (std::uint64_t p : lfres::primes_in(s.lo, s.hi).primes) {
          expected *= mpz_class(p);
        }
        const mpz_class* got = mod.find(i, j);
        if (expected == 1) {
          CHECK(got == nullptr);
        } else {
          REQUIRE(got != nullptr);
          CHECK(*got == expected);
        }
      }
    }
  }

  SUBCASE("rejects degenerate intervals") {
    CHECK_THROWS_AS((void)lfres::phase1_moduli(1, 5), std::invalid_argument);
    CHECK_THROWS_AS((void)lfres::phase1_moduli(9, 9), std::invalid_argument);
  }
}

TEST_CASE("phase2 folds the prefix product under the root modulus") {
  SUBCASE("from scratch") {
    Checkpoint ck;
    const MatPair r = lfres::phase2_prefix(4, mpz_class(35), ck);
    CHECK(r.a == 24);  // 4! mod 35
    CHECK(r.b == 10);  // !4 mod 35
    CHECK(ck.m == 4);

    Checkpoint ck0;
    const MatPair r0 = lfres::phase2_prefix(0, mpz_class(7), ck0);
    CHECK(r0 == lfres::mat_identity());
  }

  SUBCASE("resuming an existing frontier gives the same fold") {
    Checkpoint fresh;
    const MatPair direct = lfres::phase2_prefix(8, mpz_class(77), fresh);
    CHECK(direct.a == 49);  // 8! = 40320 ≡ 49 (mod 77)
    CHECK(direct.b == 62);  // !8 = 5914 ≡ 62 (mod 77)

    Checkpoint staged;
    (void)lfres::phase2_prefix(4, mpz_class(35), staged);
    const MatPair resumed = lfres::phase2_prefix(8, mpz_class(77), staged);
    CHECK(resumed == direct);
    CHECK(staged.m == 8);
  }

  SUBCASE("frontier ahead of the target is rejected") {
    Checkpoint ck;
    ck.extend_to(16);
    CHECK_THROWS_AS((void)lfres::phase2_prefix(8, mpz_class(77), ck),
                    lfres::CheckpointError);
  }
}

TEST_CASE("phase3 stores each block product reduced by its own modulus") {
  const std::uint64_t m = 96, n = 160;
  const lfres::SegmentModuli mod = lfres::phase1_moduli(m, n);
  const lfres::BlockMap blocks = lfres::phase3_blocks(m, n, mod);
  const int h = lfres::tree_height(m, n);
  for (int i = 0; i <= h; ++i) {
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << i); ++j) {
      const lfres::Segment s = lfres::segment(m, n, i, j);
      const mpz_class* p = mod.find(i, j);
      const MatPair* own = blocks.find_own(i, j);
      if (p == nullptr) {
        CHECK(own == nullptr);
        continue;
      }
      REQUIRE(own != nullptr);
      // A_{i,j} = C_{lo+1} ... C_{hi} reduced by P_{i,j}.
      const MatPair direct =
          lfres::reduce(lfres::mat_product_range(s.lo + 1, s.hi), *p);
      CHECK(*own == direct);
    }
  }
}

TEST_CASE("phase3 carries left-block products reduced by the sibling modulus") {
  const std::uint64_t m = 96, n = 160;
  const lfres::SegmentModuli mod = lfres::phase1_moduli(m, n);
  const lfres::BlockMap blocks = lfres::phase3_blocks(m, n, mod);
  const int h = lfres::tree_height(m, n);
  for (int i = 1; i <= h; ++i) {
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << i); j += 2) {
      const mpz_class* sibling = mod.find(i, j + 1);
      const MatPair* carry = blocks.find_carry(i, j);
      if (sibling == nullptr) {
        CHECK(carry == nullptr);  // no odd-child step will need this block
        continue;
      }
      REQUIRE(carry != nullptr);
      const lfres::Segment s = lfres::segment(m, n, i, j);
      const MatPair direct =
          lfres::reduce(lfres::mat_product_range(s.lo + 1, s.hi), *sibling);
      CHECK(*carry == direct);
    }
  }
}

TEST_CASE("phase4 descends to per-prime left-factorial residues") {
  SUBCASE("interval (4, 8]") {
    const lfres::SegmentModuli mod = lfres::phase1_moduli(4, 8);
    Checkpoint ck;
    const MatPair r00 = lfres::phase2_prefix(4, mod.root(), ck);
    const lfres::BlockMap blocks = lfres::phase3_blocks(4, 8, mod);
    const lfres::DescentResult got = lfres::phase4_descend(r00, blocks, mod);
    REQUIRE(got.records.size() == 2);
    CHECK(got.records[0] == lfres::ResidueRecord{5, {-1, 5}});   // !5 ≡ 4 ≡ -1
    CHECK(got.records[1] == lfres::ResidueRecord{7, {-1, 7}});   // !7 ≡ 6 ≡ -1
    CHECK_FALSE(got.counterexample);
  }

  SUBCASE("wider interval matches the oracle") {
    const std::uint64_t m = 2, n = 1000;
    const lfres::SegmentModuli mod = lfres::phase1_moduli(m, n);
    Checkpoint ck;
    const MatPair r00 = lfres::phase2_prefix(m, mod.root(), ck);
    const lfres::BlockMap blocks = lfres::phase3_blocks(m, n, mod);
    const lfres::DescentResult got = lfres::phase4_descend(r00, blocks, mod);
    CHECK(got.records == oracle_records(m, n));
    CHECK_FALSE(got.counterexample);
  }
}

TEST_CASE("scan_interval matches the oracle on (2, 100]") {
  const lfres::ScanOutcome out = lfres::scan_interval(2, 100);
  CHECK(out.records.size() == 24);  // odd primes up to 100
  CHECK(out.records == oracle_records(2, 100));
  CHECK_FALSE(out.counterexample);
  CHECK(out.checkpoint.m == 100);
  CHECK(out.resumed_from == 0);
}

TEST_CASE("scan_interval is chunk-invariant") {
  for (std::uint64_t n : {std::uint64_t{1000}, std::uint64_t{10000}}) {
    const lfres::ScanOutcome whole = lfres::scan_interval(2, n);

    lfres::ScanOptions quarters;
    quarters.block_budget = (n - 2 + 3) / 4;
    int chunks = 0;
    const lfres::ScanOutcome split = lfres::scan_interval(
        2, n, nullptr, quarters,
        [&](const std::vector<lfres::ResidueRecord>&, const Checkpoint&) {
          ++chunks;
        });
    CHECK(chunks == 4);
    CHECK(split.records == whole.records);
    CHECK(split.checkpoint == whole.checkpoint);

    lfres::ScanOptions tiny;
    tiny.block_budget = 97;  // awkward non-power-of-two chunking
    const lfres::ScanOutcome shredded = lfres::scan_interval(2, n, nullptr, tiny);
    CHECK(shredded.records == whole.records);
    CHECK(shredded.checkpoint == whole.checkpoint);

    CHECK(csv_of(split.records) == csv_of(whole.records));
  }
}

TEST_CASE("scan_interval validates its arguments") {
  CHECK_THROWS_AS((void)lfres::scan_interval(1, 10), std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::scan_interval(10, 10), std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::scan_interval(12, 10), std::invalid_argument);
  lfres::ScanOptions bad;
  bad.block_budget = 0;
  CHECK_THROWS_AS((void)lfres::scan_interval(2, 10, nullptr, bad),
                  std::invalid_argument);
}

TEST_CASE("scan_interval resumes from a stored checkpoint") {
  TempDir tmp("resume");

  std::vector<lfres::ResidueRecord> stitched;
  {
    lfres::CheckpointStore store(tmp.path);
    const lfres::ScanOutcome first = lfres::scan_interval(2, 5000, &store);
    CHECK(first.resumed_from == 0);
    stitched = first.records;
  }
  {
    lfres::CheckpointStore store(tmp.path);
    const lfres::ScanOutcome second = lfres::scan_interval(5000, 10000, &store);
    CHECK(second.resumed_from == 5000);  // frontier picked up where it stopped
    CHECK_FALSE(second.ignored_incompatible);
    stitched.insert(stitched.end(), second.records.begin(), second.records.end());
  }
  const lfres::ScanOutcome whole = lfres::scan_interval(2, 10000);
  CHECK(stitched == whole.records);
}

TEST_CASE("scan_interval reuses a frontier that stops short of m") {
  TempDir tmp("short");
  {
    lfres::CheckpointStore store(tmp.path);
    (void)lfres::scan_interval(2, 3000, &store);
  }
  lfres::CheckpointStore store(tmp.path);
  const lfres::ScanOutcome out = lfres::scan_interval(4000, 6000, &store);
  CHECK(out.resumed_from == 3000);
  CHECK(out.records == oracle_records(4000, 6000));
}

TEST_CASE("scan_interval ignores a frontier past m") {
  TempDir tmp("past");
  {
    lfres::CheckpointStore store(tmp.path);
    (void)lfres::scan_interval(2, 8000, &store);
  }
  lfres::CheckpointStore store(tmp.path);
  const lfres::ScanOutcome out = lfres::scan_interval(2, 1000, &store);
  CHECK(out.resumed_from == 0);
  CHECK(out.ignored_incompatible);
  CHECK(out.records == oracle_records(2, 1000));
}

TEST_CASE("checkpoint frontier mirrors a binary counter") {
  Checkpoint ck;
  ck.extend_to(6);
  ck.validate();
  REQUIRE(ck.blocks.size() == 2);  // 6 = 4 + 2 -> blocks [1..4], [5..6]
  CHECK(ck.blocks[0].k_start == 1);
  CHECK(ck.blocks[0].k_end == 4);
  CHECK(ck.blocks[1].k_start == 5);
  CHECK(ck.blocks[1].k_end == 6);
  CHECK(ck.blocks[0].value == lfres::mat_product_range(1, 4));
  CHECK(ck.blocks[1].value == lfres::mat_product_range(5, 6));

  ck.extend_to(8);  // 7, 8 arrive; everything merges into one block [1..8]
  ck.validate();
  REQUIRE(ck.blocks.size() == 1);
  CHECK(ck.blocks[0].k_end == 8);
  CHECK(ck.blocks[0].value == lfres::mat_product_range(1, 8));

  CHECK_THROWS_AS(ck.extend_to(5), lfres::CheckpointError);
}

TEST_CASE("checkpoint extension is path-independent") {
  std::mt19937_64 rng(0xC4B);
  for (int trial = 0; trial < 20; ++trial) {
    Checkpoint direct;
    Checkpoint staged;
    std::uint64_t at = 0;
    for (int step = 0; step < 6; ++step) {
      at += 1 + rng() % 50;
      staged.extend_to(at);
    }
    direct.extend_to(at);
    CHECK(direct == staged);
    direct.validate();
  }
}

TEST_CASE("fold_mod equals direct reduction of the whole prefix") {
  for (std::uint64_t m : {std::uint64_t{1}, std::uint64_t{6}, std::uint64_t{37},
                          std::uint64_t{128}, std::uint64_t{1000}}) {
    Checkpoint ck;
    ck.extend_to(m);
    const mpz_class modulus = 1000003;
    const MatPair expected =
        lfres::reduce(lfres::mat_product_range(1, m), modulus);
    CHECK(ck.fold_mod(modulus) == expected);
  }
  Checkpoint empty;
  CHECK(empty.fold_mod(mpz_class(97)) == lfres::mat_identity());
}

TEST_CASE("checkpoint validate rejects broken frontiers") {
  Checkpoint ck;
  ck.extend_to(12);
  ck.validate();

  Checkpoint gap = ck;
  gap.blocks[1].k_start += 1;
  CHECK_THROWS_AS(gap.validate(), lfres::CheckpointError);

  Checkpoint wrong_m = ck;
  wrong_m.m += 1;
  CHECK_THROWS_AS(wrong_m.validate(), lfres::CheckpointError);

  Checkpoint wrong_start = ck;
  wrong_start.blocks[0].k_start = 2;
  CHECK_THROWS_AS(wrong_start.validate(), lfres::CheckpointError);
}

TEST_CASE("checkpoint files round-trip byte-for-byte") {
  TempDir tmp("ckio");
  Checkpoint ck;
  ck.extend_to(1000);

  const fs::path first = tmp.path / "a.lfck";
  const fs::path second = tmp.path / "b.lfck";
  lfres::save_checkpoint(first, ck);
  const Checkpoint loaded = lfres::load_checkpoint(first);
  CHECK(loaded == ck);
  lfres::save_checkpoint(second, loaded);

  std::ifstream fa(first, std::ios::binary);
  std::ifstream fb(second, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
  const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
  CHECK(bytes_a == bytes_b);
  CHECK_FALSE(bytes_a.empty());
}

TEST_CASE("checkpoint loader rejects damaged files") {
  TempDir tmp("ckbad");
  Checkpoint ck;
  ck.extend_to(20);
  const fs::path file = tmp.path / "ck.lfck";
  lfres::save_checkpoint(file, ck);

  std::string bytes;
  {
    std::ifstream in(file, std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)), {});
  }

  SUBCASE("truncated") {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS((void)lfres::load_checkpoint(file), lfres::CheckpointError);
  }

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    CHECK_THROWS_AS((void)lfres::load_checkpoint(file), lfres::CheckpointError);
  }

  SUBCASE("trailing garbage") {
    std::ofstream out(file, std::ios::binary | std::ios::app);
    out.write("zz", 2);
    out.close();
    CHECK_THROWS_AS((void)lfres::load_checkpoint(file), lfres::CheckpointError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)lfres::load_checkpoint(tmp.path / "nope.lfck"),
                    lfres::CheckpointError);
  }
}

TEST_CASE("checkpoint store locks its directory") {
  TempDir tmp("lock");
  lfres::CheckpointStore store(tmp.path);
  CHECK_FALSE(store.load().has_value());

  Checkpoint ck;
  ck.extend_to(64);
  store.save(ck);
  REQUIRE(store.load().has_value());
  CHECK(*store.load() == ck);

  CHECK_THROWS_AS((void)lfres::CheckpointStore(tmp.path), lfres::CheckpointError);
}

TEST_CASE("residue CSV round-trips") {
  const std::vector<lfres::ResidueRecord> records = oracle_records(2, 500);
  const std::string text = csv_of(records);
  CHECK(text.substr(0, 10) == "p,residue\n");

  std::istringstream in(text);
  CHECK(lfres::read_residue_csv(in) == records);

  SUBCASE("CRLF input is tolerated") {
    std::string crlf;
    for (char c : text) {
      if (c == '\n') crlf += '\r';
      crlf += c;
    }
    std::istringstream win(crlf);
    CHECK(lfres::read_residue_csv(win) == records);
  }

  SUBCASE("malformed rows are rejected") {
    std::istringstream bad1("p,residue\n5,\n");
    CHECK_THROWS_AS((void)lfres::read_residue_csv(bad1), std::runtime_error);
    std::istringstream bad2("p,residue\nx,-1\n");
    CHECK_THROWS_AS((void)lfres::read_residue_csv(bad2), std::runtime_error);
    std::istringstream bad3("wrong,header\n5,-1\n");
    CHECK_THROWS_AS((void)lfres::read_residue_csv(bad3), std::runtime_error);
  }
}
