/**
 * @file tools/main.cpp
 * @copyright Apache License 2.0
 *
 * lfres: left-factorial residue toolkit.
 *   scan      four-phase interval scan, CSV out, near-miss report
 *   verify    single residue in O(p^0.5+eps), independent of the scan
 *   oracle    single residue by O(p) summation
 *   socialist necessary-condition filter plus brute-force confirmation
 *   predict   heuristic expectations for an exponent interval
 *   report    re-analyze an existing residue CSV
 */
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfres/analysis.hpp"
#include "lfres/pipeline.hpp"
#include "lfres/primes.hpp"
#include "lfres/verify.hpp"

namespace {

using std::uint64_t;

struct ScanArgs {
  uint64_t from = 0;
  uint64_t to = 0;
  std::string out;
  uint64_t threshold = 100;
  std::string checkpoint_dir;
  uint64_t block_budget = uint64_t{1} << 22;
  int threads = 0;
};

int cmd_scan(const ScanArgs& args) {
  if (args.from < 2 || args.to <= args.from) {
    std::cerr << "error: scan requires 2 <= --from < --to (the interval is (from, to])\n";
    return 1;
  }
  std::optional<lfres::CheckpointStore> store;
  if (!args.checkpoint_dir.empty()) store.emplace(args.checkpoint_dir);

  std::ofstream file;
  std::ostream* csv = &std::cout;
  std::ostream* report_stream = &std::cerr;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot open " << args.out << " for writing\n";
      return 1;
    }
    csv = &file;
    report_stream = &std::cout;
  }

  lfres::write_residue_csv_header(*csv);
  const lfres::ChunkSink sink = [&](const std::vector<lfres::ResidueRecord>& records,
                                    const lfres::Checkpoint&) {
    lfres::write_residue_rows(*csv, records);
    csv->flush();
  };

  lfres::ScanOptions options;
  options.block_budget = args.block_budget;
  options.threads = args.threads;
  const lfres::ScanOutcome outcome = lfres::scan_interval(
      args.from, args.to, store ? &*store : nullptr, options, sink);
  if (!args.out.empty() && !file) {
    std::cerr << "error: writing " << args.out << " failed\n";
    return 1;
  }

  if (outcome.ignored_incompatible)
    std::cerr << "note: stored checkpoint covers more than --from; ignored, started fresh\n";
  else if (outcome.resumed_from > 0)
    std::cerr << "note: resumed from checkpoint frontier m=" << outcome.resumed_from << "\n";

  const lfres::NearMissReport report = lfres::kurepa_scan(outcome.records, args.threshold);
  *report_stream << near_miss_text(report);
  return outcome.counterexample ? 2 : 0;
}

int cmd_verify(uint64_t prime, int threads) {
  if (prime < 5 || !lfres::is_prime_u64(prime)) {
    std::cerr << "error: --prime must be an odd prime > 3\n";
    return 1;
  }
  std::cout << lfres::verify_residue(prime, threads).value << "\n";
  return 0;
}

int cmd_oracle(uint64_t prime) {
  if (prime < 2) {
    std::cerr << "error: --prime must be >= 2\n";
    return 1;
  }
  std::cout << lfres::balance(lfres::left_factorial_oracle(prime), prime).value << "\n";
  return 0;
}

struct SocialistArgs {
  uint64_t from = 0;
  uint64_t to = 0;
  std::string out;
  uint64_t block_budget = uint64_t{1} << 22;
  int threads = 0;
};

int cmd_socialist(const SocialistArgs& args) {
  if (args.from < 2 || args.to <= args.from) {
    std::cerr << "error: socialist requires 2 <= --from < --to (the interval is (from, to])\n";
    return 1;
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot open " << args.out << " for writing\n";
      return 1;
    }
    out = &file;
  }

  lfres::ScanOptions options;
  options.block_budget = args.block_budget;
  options.threads = args.threads;
  const lfres::ScanOutcome outcome =
      lfres::scan_interval(args.from, args.to, nullptr, options);

  // The necessary condition is stated for p > 5; the primes up to 5 go
  // straight to the brute-force definition.
  constexpr uint64_t kBruteLimit = uint64_t{1} << 33;
  uint64_t candidates = 0;
  uint64_t socialist = 0;
  *out << "p,residue,filter,socialist\n";
  for (const auto& rec : outcome.records) {
    const bool small = rec.p <= 5;
    bool candidate = true;
    const char* filter_col = "-";
    if (!small) {
      const uint64_t raw = rec.residue.value >= 0
                               ? static_cast<uint64_t>(rec.residue.value)
                               : rec.p - static_cast<uint64_t>(-rec.residue.value);
      candidate = lfres::socialist_filter(rec.p, raw);
      filter_col = candidate ? "pass" : "fail";
      if (!candidate) continue;  // only candidates are listed and checked
    }
    ++candidates;
    const char* verdict = "unchecked";
    if (rec.p <= kBruteLimit) {
      const bool confirmed = lfres::socialist_bruteforce(rec.p);
      verdict = confirmed ? "yes" : "no";
      if (confirmed) ++socialist;
    } else {
      std::cerr << "warning: p=" << rec.p << " too large for the O(p) brute-force check\n";
    }
    *out << rec.p << ',' << rec.residue.value << ',' << filter_col << ',' << verdict
         << '\n';
  }
  std::cerr << "examined " << outcome.records.size() << " primes in (" << args.from
            << ", " << args.to << "]; " << candidates << " candidates; " << socialist
            << " socialist\n";
  return 0;
}

int cmd_predict(double from_exp, double to_exp, uint64_t ell) {
  std::cout << "expected_count " << lfres::expected_low_residues(from_exp, to_exp, ell)
            << "\n"
            << "counterexample_probability "
            << lfres::counterexample_probability(from_exp, to_exp) << "\n";
  return 0;
}

struct ReportArgs {
  std::string in;
  std::string out;
  uint64_t threshold = 100;
  bool json = false;
};

int cmd_report(const ReportArgs& args) {
  std::ifstream in(args.in);
  if (!in) {
    std::cerr << "error: cannot open " << args.in << "\n";
    return 1;
  }
  const std::vector<lfres::ResidueRecord> records = lfres::read_residue_csv(in);
  const lfres::NearMissReport report = lfres::kurepa_scan(records, args.threshold);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot open " << args.out << " for writing\n";
      return 1;
    }
    out = &file;
  }
  if (args.json)
    *out << lfres::near_miss_json(report) << "\n";
  else
    *out << lfres::near_miss_text(report);
  return report.counterexample ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"left-factorial residues: interval scans, sqrt-time verification, analysis"};
  app.require_subcommand(1);

  ScanArgs scan_args;
  CLI::App* scan = app.add_subcommand("scan", "compute r_p for every prime in (from, to]");
  scan->add_option("--from", scan_args.from, "interval base m, exclusive")->required();
  scan->add_option("--to", scan_args.to, "interval end n, inclusive")->required();
  scan->add_option("--out", scan_args.out, "CSV output path (default: stdout)");
  scan->add_option("--threshold", scan_args.threshold,
                   "near-miss cut |r_p| < threshold for the report")
      ->default_val(uint64_t{100});
  scan->add_option("--checkpoint-dir", scan_args.checkpoint_dir,
                   "directory holding the prefix-product checkpoint");
  scan->add_option("--block-budget", scan_args.block_budget,
                   "sub-interval width per pipeline pass")
      ->default_val(uint64_t{1} << 22);
  scan->add_option("--threads", scan_args.threads, "worker threads (0 = all cores)")
      ->default_val(0);

  uint64_t verify_prime = 0;
  int verify_threads = 0;
  CLI::App* verify = app.add_subcommand("verify", "one r_p in O(p^0.5+eps) time");
  verify->add_option("--prime", verify_prime, "odd prime > 3")->required();
  verify->add_option("--threads", verify_threads, "worker threads (0 = all cores)")
      ->default_val(0);

  uint64_t oracle_prime = 0;
  CLI::App* oracle = app.add_subcommand("oracle", "one r_p by direct O(p) summation");
  oracle->add_option("--prime", oracle_prime, "modulus p >= 2")->required();

  SocialistArgs soc_args;
  CLI::App* soc = app.add_subcommand(
      "socialist", "filter + brute-force socialist-prime candidates in (from, to]");
  soc->add_option("--from", soc_args.from, "interval base m, exclusive")->required();
  soc->add_option("--to", soc_args.to, "interval end n, inclusive")->required();
  soc->add_option("--out", soc_args.out, "candidate CSV path (default: stdout)");
  soc->add_option("--block-budget", soc_args.block_budget,
                  "sub-interval width per pipeline pass")
      ->default_val(uint64_t{1} << 22);
  soc->add_option("--threads", soc_args.threads, "worker threads (0 = all cores)")
      ->default_val(0);

  double from_exp = 0.0;
  double to_exp = 0.0;
  uint64_t ell = 100;
  CLI::App* predict = app.add_subcommand(
      "predict", "heuristic expectations for the interval (2^from-exp, 2^to-exp)");
  predict->add_option("--from-exp", from_exp, "lower exponent, > 0")->required();
  predict->add_option("--to-exp", to_exp, "upper exponent, > from-exp")->required();
  predict->add_option("--ell", ell, "near-miss cut |r_p| < ell")->default_val(uint64_t{100});

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "re-analyze an existing residue CSV");
  report->add_option("--in", report_args.in, "residue CSV produced by scan")->required();
  report->add_option("--out", report_args.out, "report output path (default: stdout)");
  report->add_option("--threshold", report_args.threshold,
                     "near-miss cut |r_p| < threshold")
      ->default_val(uint64_t{100});
  report->add_flag("--json", report_args.json, "emit JSON instead of the text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0, malformed flags exit 1
  }

  try {
    if (scan->parsed()) return cmd_scan(scan_args);
    if (verify->parsed()) return cmd_verify(verify_prime, verify_threads);
    if (oracle->parsed()) return cmd_oracle(oracle_prime);
    if (soc->parsed()) return cmd_socialist(soc_args);
    if (predict->parsed()) return cmd_predict(from_exp, to_exp, ell);
    if (report->parsed()) return cmd_report(report_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
