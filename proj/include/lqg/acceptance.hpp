#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lqg {

struct CriterionResult {
  std::string id;      // C01 .. C18
  std::string name;
  std::string target;       // human-readable target
  double measured = 0.0;    // headline measured value
  double tolerance = 0.0;   // headline tolerance (0 = exact)
  bool pass = false;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string detail;       // per-subcheck breakdown
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  int threads = 0;                  // 0 = resolve from env/cores
  std::vector<std::string> only;    // criterion ids to run; empty = all
};

// Runs the acceptance suite, printing one pass/fail line per criterion to
// `log`.  Returns one record per executed criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

// JSON array of the per-criterion records
std::string acceptance_report_json(const std::vector<CriterionResult>& results);

}  // namespace lqg
