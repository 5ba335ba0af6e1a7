#pragma once

#include "dirackit/catalog.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dk {

struct AnalysisOptions {
  int samples = 128;
  std::uint64_t seed = 42;
  double tol = 1e-9;
};

enum class CheckStatus { Pass, Fail, Skipped, ExpectedFail, Info };

const char* status_name(CheckStatus s);

struct CheckRecord {
  std::string name;  ///< "<scope>/<stage>.<check>", scope is "system" or an action name
  CheckStatus status = CheckStatus::Pass;
  double max_residual = 0.0;
  std::optional<Point> witness;
  std::vector<std::string> witness_coords;
  std::string detail;
};

struct AnalysisReport {
  std::string system;
  std::vector<std::string> actions;
  ParamMap params;
  AnalysisOptions options;
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json objects = nlohmann::ordered_json::object();

  const CheckRecord* find(const std::string& name) const;
  bool all_passed() const;  ///< no Fail records
};

/**
 * Runs the unreduced checks and, for each named action (every action when
 * the list is empty), invariance, reduction, cross-checks, the nonholonomic
 * battery, leaf reduction and the comparison with the attached reference
 * data.  Sampling is deterministic in options.seed.  A RankError from a
 * constant-rank hypothesis propagates with its stage.
 */
AnalysisReport run_analysis(const CatalogEntry& entry, const std::vector<std::string>& actions,
                            const AnalysisOptions& options);

nlohmann::ordered_json to_json(const AnalysisReport& r);
/// Serialized report text; byte-identical for identical inputs.
std::string report_text(const AnalysisReport& r);

/// The subspace of TM or T*M described by a span specification at m.
Subspace span_from_spec(const SpanSpec& s, const NonholonomicModel& model, const std::vector<Field>& elements,
                        const Point& m, double tol);
/// The Dirac structure a structure specification describes on a chart.
DiracStructure structure_from_spec(const StructureSpec& s, const ChartPtr& chart, const ParamMap& params);

}  // namespace dk
