// Acceptance suite runner: one pass/fail line per criterion, JSON report,
// exit 0 only when every executed criterion passes.
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "lqg/acceptance.hpp"

int main(int argc, char** argv) {
  lqg::AcceptanceOptions options;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--seed") {
      options.seed = std::stoull(next());
    } else if (arg == "--threads") {
      options.threads = std::stoi(next());
    } else if (arg == "--report") {
      report_path = next();
    } else if (arg == "--only") {
      options.only.push_back(next());
    } else if (arg == "--help") {
      std::cout << "usage: acceptance [--seed N] [--threads N] [--report file.json]"
                   " [--only Cxx]...\n";
      return 0;
    } else {
      std::cerr << "unknown flag " << arg << "\n";
      return 2;
    }
  }
  const auto results = lqg::run_acceptance(options, std::cout);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << lqg::acceptance_report_json(results);
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
