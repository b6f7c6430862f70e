#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rmt::acceptance {

struct CriterionResult {
  int id = 0;
  bool passed = false;
  std::string detail;
};

/// Suites: "all", "exact" (1 2 3 7), "monte-carlo" (4 5 6 8 9), "repro" (10),
/// or a single criterion number. Prints one PASS/FAIL line per criterion.
std::vector<CriterionResult> run_suite(const std::string& name, std::ostream& out);

}  // namespace rmt::acceptance
