#pragma once

#include "dirackit/analysis.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dk {

/// One line of a criterion verdict: a sub-check and how it ended.
struct CriterionLine {
  std::string check;
  bool ok = false;
  std::string detail;
};

struct CriterionResult {
  std::string id;    ///< "1" .. "8"
  std::string name;  ///< short handle accepted by --only
  std::string title;
  bool passed = false;
  std::vector<CriterionLine> lines;
};

struct PaperCriterion {
  std::string id;
  std::string name;
  std::string title;
};

std::vector<PaperCriterion> paper_criteria();

/// Runs catalog analyses lazily and memoizes them per system.
class CatalogRuns {
 public:
  explicit CatalogRuns(AnalysisOptions options) : options_(options) {}
  const AnalysisReport& report(const std::string& system);
  const AnalysisOptions& options() const { return options_; }

 private:
  AnalysisOptions options_;
  std::map<std::string, AnalysisReport> reports_;
};

/// Runs one criterion by id or name; unknown handles throw InputError.
CriterionResult run_criterion(const std::string& handle, CatalogRuns& runs);

// Property suites (also used by the unit tests).

/// dim(A + B) + dim(A ∩ B) = dim A + dim B and (A°)° = A on random pairs with planted overlaps.
CheckOutcome grassmann_suite(int count, std::uint64_t seed);
/// Jacobi identity of the Lie bracket on random polynomial fields.
CheckOutcome jacobi_suite(int count, std::uint64_t seed, double tol);
/// d(df) = 0 and d(d alpha) = 0 on random polynomial functions and 1-forms.
CheckOutcome dd_suite(int count, std::uint64_t seed, double tol);
/// Reductions of closed structures by symmetries stay closed (canonical and magnetic T*R^3 by translations).
CheckOutcome closedness_preservation_suite(int samples, std::uint64_t seed, double tol);

}  // namespace dk
