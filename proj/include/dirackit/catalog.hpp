#pragma once

#include "dirackit/config.hpp"
#include "dirackit/nonholonomic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dk {

/// A built action with its quotient and optional leaf data.
struct ActionEntry {
  ActionSpec spec;
  LiftedAction lifted;     ///< base_generators empty for an action given directly on M
  QuotientChart quotient;
  std::optional<Leaf> leaf;

  bool is_lift() const { return !lifted.base_generators.empty(); }
  const SymmetryAction& action() const { return lifted.action; }
};

/// A fully constructed system: model, actions, quotient charts and reference data.
struct CatalogEntry {
  SystemSpec spec;
  NonholonomicModel model;
  std::vector<ActionEntry> actions;
  std::optional<ScalarField> stated_hamiltonian;

  const ActionEntry& action(const std::string& name) const;
};

/// Names accepted by catalog_spec and load.
std::vector<std::string> catalog_names();

/// Declarative description of a built-in system.  Unknown names, unknown
/// parameters and nonpositive parameter values throw InputError.
SystemSpec catalog_spec(const std::string& name, const ParamMap& params = {});

/// Parses every expression and builds the model, actions, quotients and leaves.
CatalogEntry build_entry(const SystemSpec& spec);

CatalogEntry load(const std::string& name, const ParamMap& params = {});

/// Flat structure constants c[(l*k+i)*k+j] from the entries with i < j; the skew partners are filled in.
std::vector<double> structure_constants(int k, const std::vector<std::tuple<int, int, int, double>>& upper);

}  // namespace dk
