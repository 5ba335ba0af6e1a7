#include "dirackit/verification.hpp"

#include <iostream>

int main() {
  dk::CatalogRuns runs(dk::AnalysisOptions{});
  int failed = 0;
  for (const auto& c : dk::paper_criteria()) {
    const dk::CriterionResult r = dk::run_criterion(c.id, runs);
    if (!r.passed) ++failed;
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << "): " << r.title << "\n";
    for (const auto& l : r.lines)
      if (!l.ok) std::cout << "    FAIL " << l.check << ": " << l.detail << "\n";
  }
  std::cout << failed << " of " << dk::paper_criteria().size() << " criteria failed\n";
  return failed == 0 ? 0 : 1;
}
