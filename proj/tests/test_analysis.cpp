/**
 * @file tests/test_analysis.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/analysis.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lfres/matpair.hpp"
#include "lfres/pipeline.hpp"
#include "lfres/primes.hpp"

namespace {

using u64 = std::uint64_t;

std::vector<lfres::ResidueRecord> oracle_records(u64 m, u64 n) {
  std::vector<lfres::ResidueRecord> out;
  for (u64 p : lfres::primes_in(m, n).primes) {
    out.push_back({p, lfres::balance(lfres::left_factorial_oracle(p), p)});
  }
  return out;
}

}  // namespace

TEST_CASE("kurepa_scan flags residues below the threshold") {
  const std::vector<lfres::ResidueRecord> records = oracle_records(2, 100);

  SUBCASE("threshold 2 keeps |r_p| < 2") {
    const lfres::NearMissReport report = lfres::kurepa_scan(records, 2);
    CHECK(report.threshold == 2);
    // r_3 = 1, r_5 = -1, r_7 = -1, r_11 = 1, ... collect and check a few.
    bool saw3 = false, saw11 = false;
    for (const lfres::ResidueRecord& row : report.rows) {
      CHECK(std::abs(row.residue.value) < 2);
      if (row.p == 3) {
        saw3 = true;
        CHECK(row.residue.value == 1);
      }
      if (row.p == 11) {
        saw11 = true;
        CHECK(row.residue.value == 1);
      }
    }
    CHECK(saw3);
    CHECK(saw11);
    CHECK(report.observed_count == report.rows.size());
    CHECK_FALSE(report.counterexample);
  }

  SUBCASE("threshold 1 finds no zero residues among odd primes") {
    const lfres::NearMissReport report = lfres::kurepa_scan(records, 1);
    for (const lfres::ResidueRecord& row : report.rows) {
      CHECK(row.residue.value == 0);
      CHECK(row.p == 2);  // only the even prime may sit at zero
    }
    CHECK_FALSE(report.counterexample);
  }

  SUBCASE("bigger thresholds keep more rows") {
    const std::size_t n2 = lfres::kurepa_scan(records, 2).rows.size();
    const std::size_t n10 = lfres::kurepa_scan(records, 10).rows.size();
    const std::size_t nall = lfres::kurepa_scan(records, 1u << 30).rows.size();
    CHECK(n2 <= n10);
    CHECK(n10 <= nall);
    CHECK(nall == records.size());
  }

  SUBCASE("threshold must be positive") {
    CHECK_THROWS_AS((void)lfres::kurepa_scan(records, 0), std::invalid_argument);
  }
}

TEST_CASE("kurepa_scan counterexample flag") {
  // A fabricated odd p with r_p = 0 must raise the flag...
  const std::vector<lfres::ResidueRecord> bad{
      {101, {0, 101}}, {103, {5, 103}}};
  CHECK(lfres::kurepa_scan(bad, 3).counterexample);
  // ...while p = 2 (where !2 = 2 ≡ 0 genuinely) must not.
  const std::vector<lfres::ResidueRecord> fine{{2, {0, 2}}, {3, {1, 3}}};
  CHECK_FALSE(lfres::kurepa_scan(fine, 3).counterexample);
}

TEST_CASE("kurepa_scan keeps known large near-misses") {
  // Synthetic records reproducing published low-residue primes.
  const std::vector<lfres::ResidueRecord> records{
      {22370028691ULL, {-55, 22370028691ULL}},
      {39541338091ULL, {-1, 39541338091ULL}},
      {885831128921ULL, {-35, 885831128921ULL}},
  };
  const lfres::NearMissReport report = lfres::kurepa_scan(records, 100);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[1].p == 39541338091ULL);
  CHECK(report.rows[1].residue.value == -1);
  CHECK_FALSE(report.counterexample);
}

TEST_CASE("expected count integrates the density over the record span") {
  // Records spanning exactly 2^20 .. 2^24 at threshold t should expect about
  // (2t-1) * ln(24/20) residues; use records pinned at the endpoints.
  const std::vector<lfres::ResidueRecord> records{
      {u64{1} << 20, {7, u64{1} << 20}},
      {u64{1} << 24, {-9, u64{1} << 24}},
  };
  const lfres::NearMissReport report = lfres::kurepa_scan(records, 100);
  const double expected = (2.0 * 100 - 1.0) * std::log(24.0 / 20.0);
  CHECK(report.expected_count == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("socialist_filter is exactly r in {1, 3}") {
  for (const u64 p : {u64{7}, u64{11}, u64{13}, u64{101}, u64{65537}}) {
    for (u64 r = 0; r < std::min<u64>(p, 2000); ++r) {
      const bool expected = (r == 1 || r == 3);
      CHECK(lfres::socialist_filter(p, r) == expected);
    }
    // The wrap-around cases near p.
    CHECK_FALSE(lfres::socialist_filter(p, p - 1));
    CHECK_FALSE(lfres::socialist_filter(p, p - 2));
  }
  CHECK(lfres::socialist_filter(11, 1));
  CHECK(lfres::socialist_filter(11, 3));
  CHECK_FALSE(lfres::socialist_filter(7, 6));
  CHECK_THROWS_AS((void)lfres::socialist_filter(5, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::socialist_filter(2, 0), std::invalid_argument);
}

TEST_CASE("socialist_bruteforce ground truth for small primes") {
  // 2! .. (p-1)! distinct mod p: true for 3 and 5, false beyond.
  CHECK(lfres::socialist_bruteforce(3));
  CHECK(lfres::socialist_bruteforce(5));
  CHECK_FALSE(lfres::socialist_bruteforce(7));
  CHECK_FALSE(lfres::socialist_bruteforce(11));
  CHECK_FALSE(lfres::socialist_bruteforce(13));
  for (const u64 p : lfres::primes_in(5, 2000).primes) {
    CHECK_FALSE(lfres::socialist_bruteforce(p));
  }
  CHECK_THROWS_AS((void)lfres::socialist_bruteforce(2), std::invalid_argument);
}

TEST_CASE("filter never rejects a true socialist prime") {
  // Soundness on the range where ground truth is cheap: any prime the
  // brute force accepts must also pass the residue filter.
  const std::vector<lfres::ResidueRecord> records = oracle_records(5, 3000);
  for (const lfres::ResidueRecord& rec : records) {
    const u64 raw = rec.residue.value >= 0
                        ? static_cast<u64>(rec.residue.value)
                        : rec.p - static_cast<u64>(-rec.residue.value);
    if (lfres::socialist_bruteforce(rec.p)) {
      CHECK(lfres::socialist_filter(rec.p, raw));
    }
  }
}

TEST_CASE("expected_low_residues reproduces the reference figures") {
  CHECK(lfres::expected_low_residues(34, 40, 10000) ==
        doctest::Approx(3250.2).epsilon(1e-4));
  CHECK(lfres::expected_low_residues(34, 40, 100) ==
        doctest::Approx(32.3).epsilon(1e-2));
  CHECK(lfres::expected_low_residues(34, 40, 10000000) ==
        doctest::Approx(3250379).epsilon(1e-6));
  // Closed form sanity: (2t-1) ln(n/m).
  CHECK(lfres::expected_low_residues(10, 20, 1) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS((void)lfres::expected_low_residues(40, 34, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::expected_low_residues(0, 34, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::expected_low_residues(34, 40, 0),
                  std::invalid_argument);
}

TEST_CASE("counterexample_probability is 1 - m/n") {
  CHECK(lfres::counterexample_probability(34, 40) ==
        doctest::Approx(0.15).epsilon(1e-12));
  CHECK(lfres::counterexample_probability(20, 24) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(lfres::counterexample_probability(7, 7) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)lfres::counterexample_probability(8, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)lfres::counterexample_probability(0, 7),
                  std::invalid_argument);
}

TEST_CASE("heuristics are monotone where they should be") {
  double prev = 0.0;
  for (const u64 t : {u64{1}, u64{10}, u64{100}, u64{1000}}) {
    const double e = lfres::expected_low_residues(30, 40, t);
    CHECK(e > prev);
    prev = e;
  }
  CHECK(lfres::counterexample_probability(30, 50) >
        lfres::counterexample_probability(30, 40));
}

TEST_CASE("near-miss reports render to text and JSON") {
  const std::vector<lfres::ResidueRecord> records = oracle_records(2, 300);
  const lfres::NearMissReport report = lfres::kurepa_scan(records, 5);

  const std::string text = lfres::near_miss_text(report);
  CHECK(text.find("threshold 5") != std::string::npos);
  CHECK(text.find("observed") != std::string::npos);
  CHECK(text.find("COUNTEREXAMPLE") == std::string::npos);

  const nlohmann::json doc = nlohmann::json::parse(lfres::near_miss_json(report));
  CHECK(doc.at("threshold").get<u64>() == 5);
  CHECK(doc.at("observed").get<std::size_t>() == report.observed_count);
  CHECK(doc.at("counterexample").get<bool>() == false);
  REQUIRE(doc.at("rows").is_array());
  REQUIRE(doc.at("rows").size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    CHECK(doc.at("rows")[i].at("p").get<u64>() == report.rows[i].p);
    CHECK(doc.at("rows")[i].at("residue").get<std::int64_t>() ==
          report.rows[i].residue.value);
  }

  // A fabricated counterexample must scream in both renderings.
  const std::vector<lfres::ResidueRecord> bad{{9973, {0, 9973}}};
  const lfres::NearMissReport alarm = lfres::kurepa_scan(bad, 5);
  CHECK(lfres::near_miss_text(alarm).find("COUNTEREXAMPLE") != std::string::npos);
  const nlohmann::json alarm_doc =
      nlohmann::json::parse(lfres::near_miss_json(alarm));
  CHECK(alarm_doc.at("counterexample").get<bool>() == true);
}
