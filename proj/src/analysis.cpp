/**
 * @file src/analysis.cpp
 * @copyright Apache License 2.0
 */
#include "lfres/analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lfres/detail/modarith.hpp"

namespace lfres {

NearMissReport kurepa_scan(const std::vector<ResidueRecord>& records,
                           std::uint64_t threshold) {
  if (threshold < 1) throw std::invalid_argument("kurepa_scan: threshold must be >= 1");
  NearMissReport report;
  report.threshold = threshold;
  for (const auto& rec : records) {
    const std::int64_t v = rec.residue.value;
    if (static_cast<std::uint64_t>(v < 0 ? -v : v) < threshold)
      report.rows.push_back(rec);
    if (v == 0 && (rec.p & 1) != 0) report.counterexample = true;
  }
  report.observed_count = report.rows.size();
  if (records.size() >= 2 && records.front().p < records.back().p) {
    const double m_exp = std::log2(static_cast<double>(records.front().p));
    const double n_exp = std::log2(static_cast<double>(records.back().p));
    if (n_exp > m_exp)
      report.expected_count = expected_low_residues(m_exp, n_exp, threshold);
  }
  return report;
}

bool socialist_filter(std::uint64_t p, std::uint64_t r) {
  if (p <= 5)
    throw std::invalid_argument("socialist_filter: the condition is stated for p > 5");
  r %= p;
  // (r - 2)^2 ≡ 1 (mod p)
  const std::uint64_t d = r >= 2 ? r - 2 : r + p - 2;
  return detail::mulmod_u64(d, d, p) == 1;
}

bool socialist_bruteforce(std::uint64_t p) {
  if (p < 3) throw std::invalid_argument("socialist_bruteforce: p must be >= 3");
  std::vector<bool> seen(p, false);
  std::uint64_t fact = 1;
  for (std::uint64_t k = 2; k < p; ++k) {
    fact = detail::mulmod_u64(fact, k, p);
    if (seen[fact]) return false;
    seen[fact] = true;
  }
  return true;
}

double expected_low_residues(double m_exp, double n_exp, std::uint64_t threshold) {
  if (!(m_exp > 0.0) || !(n_exp > m_exp))
    throw std::invalid_argument("expected_low_residues: need n_exp > m_exp > 0");
  if (threshold < 1)
    throw std::invalid_argument("expected_low_residues: threshold must be >= 1");
  return (2.0 * static_cast<double>(threshold) - 1.0) * std::log(n_exp / m_exp);
}

double counterexample_probability(double m_exp, double n_exp) {
  if (!(m_exp > 0.0) || !(n_exp >= m_exp))
    throw std::invalid_argument("counterexample_probability: need n_exp >= m_exp > 0");
  return 1.0 - m_exp / n_exp;
}

std::string near_miss_text(const NearMissReport& report) {
  std::ostringstream out;
  out << "               p      r_p\n";
  for (const auto& rec : report.rows) {
    out.width(16);
    out << rec.p;
    out.width(9);
    out << rec.residue.value;
    out << '\n';
  }
  out << "threshold " << report.threshold << ", observed " << report.observed_count
      << ", expected " << report.expected_count;
  if (report.counterexample) out << ", COUNTEREXAMPLE PRESENT";
  out << '\n';
  return out.str();
}

std::string near_miss_json(const NearMissReport& report) {
  nlohmann::json j;
  j["threshold"] = report.threshold;
  j["observed"] = report.observed_count;
  j["expected"] = report.expected_count;
  j["counterexample"] = report.counterexample;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& rec : report.rows)
    rows.push_back({{"p", rec.p}, {"residue", rec.residue.value}});
  return j.dump(2);
}

}  // namespace lfres
