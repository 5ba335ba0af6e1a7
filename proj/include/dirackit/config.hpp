#pragma once

#include "dirackit/chart.hpp"
#include "dirackit/expression.hpp"
#include "dirackit/field.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dk {

using ExprList = std::vector<std::string>;
using ExprMatrix = std::vector<ExprList>;

/// Invariant coordinates of a quotient: projection from the source chart and a slice back into it.
struct QuotientSpec {
  std::vector<std::string> coords;
  std::vector<Interval> box;  ///< empty: taken from same-named source coordinates, else [-2, 2]
  ExprList projection;        ///< in source coordinates, one per reduced coordinate
  ExprList slice;             ///< in reduced coordinates, one per source coordinate
};

/// One section (X, alpha) with expression components.
struct SectionSpec {
  ExprList vec;
  ExprList form;
};

/// A Dirac structure described by sections, by the graph of a 2-form or by the graph of a bivector.
struct StructureSpec {
  std::string kind = "sections";  ///< "sections" | "two_form" | "bivector"
  std::vector<SectionSpec> sections;
  std::vector<WedgeTerm> wedges;
};

/// A subspace of TM or T*M per point.
struct SpanSpec {
  /// "elements": span of the listed fields; "kernel": common kernel of the listed 1-forms;
  /// "zero"; "full"; "horizontal" (H); "annihilator_H" (H°).
  std::string kind = "elements";
  ExprMatrix elements;
};

struct OmegaValueSpec {
  ExprList x;
  ExprList y;
  std::string value;
};

struct ThreeFormValueSpec {
  ExprList x;
  ExprList y;
  ExprList z;
  std::string value;
};

struct BracketSpec {
  std::string f;
  std::string g;
  std::string value;
};

struct CriterionSpec {
  std::vector<double> xi;
  bool conserved = false;
};

/// A section sum_i f_i xi_i of g^H with the 1-form it should produce (alpha empty: not compared).
struct NoetherSpec {
  ExprList f;
  ExprList alpha;
};

/// Reference results attached to an action (or to the unreduced system for `brackets`).
struct ExpectedSpec {
  std::optional<StructureSpec> d_red;
  std::vector<BracketSpec> brackets;
  std::vector<OmegaValueSpec> omega_hbar;
  std::optional<SpanSpec> reaction_R;
  std::optional<SpanSpec> U;
  std::optional<SpanSpec> D_G;
  std::optional<bool> dg_involutive;
  ExprList conserved;
  std::vector<CriterionSpec> criteria;
  std::vector<NoetherSpec> noether;
  std::optional<std::string> det_omega_red;
  std::vector<ThreeFormValueSpec> d_omega_red;
  std::optional<bool> d_red_closed;
  std::optional<StructureSpec> leaf_d_red;

  bool empty() const;
};

/// Level set of conserved functions, its chart and embedding, and the residual action on it.
struct LeafSpec {
  ExprList conserved;                ///< functions on M constant on the leaf
  double level = 1.0;                ///< value of the parameter `level` inside the embedding
  std::vector<std::string> coords;
  std::vector<Interval> box;
  ExprList embedding;                ///< leaf coordinates -> M
  ExprMatrix generators;             ///< on the leaf chart
  std::vector<double> structure_constants;
  QuotientSpec quotient;
};

struct ActionSpec {
  std::string name;
  ExprMatrix generators;             ///< on Q when lifted, on M otherwise
  bool lifted = true;
  std::vector<double> structure_constants;
  QuotientSpec quotient;
  std::optional<LeafSpec> leaf;
  ExpectedSpec expected;
};

/// Declarative description of a constrained mechanical system with its symmetry actions.
struct SystemSpec {
  std::string name;
  ParamMap params;
  std::vector<std::string> chart;    ///< configuration coordinates
  std::vector<Interval> box;
  ExprMatrix metric;
  std::string potential = "0";
  ExprMatrix constraints;            ///< rows of 1-form components on Q
  std::vector<std::string> eliminate;
  std::string hamiltonian;           ///< stated energy on M (empty: none)
  std::vector<ActionSpec> actions;
  ExpectedSpec expected;             ///< checks on the unreduced structure

  const ActionSpec& action(const std::string& name) const;
};

/// Shape checks that need no expression parsing; throws InputError.
void validate_spec(const SystemSpec& s);

nlohmann::json to_json(const SystemSpec& s);
/// Parses a system document; throws InputError on missing keys or wrong shapes.
SystemSpec system_from_json(const nlohmann::json& j);
SystemSpec load_system_file(const std::string& path);

}  // namespace dk
