#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unigroup::acceptance {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the bundled acceptance suite (eleven criteria). When progress is set,
// one PASS/FAIL line is printed per criterion as it completes.
std::vector<CriterionResult> run_all(std::ostream* progress = nullptr);

bool all_passed(const std::vector<CriterionResult>& results);

void print_line(std::ostream& out, const CriterionResult& result);

}  // namespace unigroup::acceptance
