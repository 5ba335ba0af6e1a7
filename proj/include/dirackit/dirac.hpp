#pragma once

#include "dirackit/calculus.hpp"
#include "dirackit/subspace.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dk {

/// Component jets of a section (X, alpha) of TM + T*M at one point.
struct SectionJets {
  JetList vec;
  JetList form;
};

using SectionList = std::vector<SectionJets>;

/// A section (X, alpha) given by fields.
struct PontryaginSection {
  VectorField vector_part;
  OneForm form_part;

  PontryaginSection(VectorField X, OneForm alpha);
  const ChartPtr& chart() const { return vector_part.chart(); }
  SectionJets eval(const Point& m) const { return {vector_part.eval(m), form_part.eval(m)}; }
};

/// Concatenated fiber vector (X(m), alpha(m)) of length 2n.
Eigen::VectorXd stack(const SectionJets& s);

/// <(u, alpha), (v, beta)> = beta(u) + alpha(v)
double pontryagin_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& alpha, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& beta);
Jet pontryagin_pairing(const SectionJets& a, const SectionJets& b);

/// ([X,Y], L_X beta - i_Y d alpha), minus 1/2 d<a,b> in the form part when skew is set.
SectionJets courant_bracket(const SectionJets& a, const SectionJets& b, bool skew = false);
PontryaginSection courant_bracket(const PontryaginSection& a, const PontryaginSection& b, bool skew = false);

/**
 * A Dirac structure given by n smooth spanning sections on a chart.
 *
 * The sections are produced pointwise by a frame function so that derived
 * structures (intersections, reductions, restrictions) can be built from
 * jets of locally chosen frames.
 */
class DiracStructure {
 public:
  using FrameFn = std::function<SectionList(const Point&)>;

  DiracStructure() = default;
  DiracStructure(ChartPtr chart, FrameFn frame);
  explicit DiracStructure(const std::vector<PontryaginSection>& sections);

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }

  /// Jets of the n spanning sections at m.
  SectionList sections(const Point& m) const;
  /// Jets of the spanning sections along a map with component jets `inner`.
  SectionList sections_composed(const JetList& inner) const;

  /// 2n x n matrix with the stacked sections as columns.
  Eigen::MatrixXd fiber_matrix(const Point& m) const;
  Subspace fiber(const Point& m) const;

 private:
  ChartPtr chart_;
  std::shared_ptr<const FrameFn> frame_;
};

Eigen::MatrixXd fiber_matrix(const SectionList& s);

/// Residual of v in D(m), relative to max(|v|, largest spanning column norm).
double membership_residual(const Subspace& fiber, const Eigen::MatrixXd& fiber_columns, const Eigen::VectorXd& v);
double membership_residual(const DiracStructure& d, const Point& m, const Eigen::VectorXd& v);

struct LagrangianDefect {
  int rank = 0;
  double max_pairing = 0.0;  ///< max |<s_i, s_j>| relative to the squared column scale
};
LagrangianDefect lagrangian_defect(const DiracStructure& d, const Point& m);

struct CharacteristicSpaces {
  Subspace G0, G1, P0, P1;
  double identity_residual = 0.0;  ///< how far G0 = P1° and P0 = G1° are from holding
  bool identities_hold = false;
  bool ill_conditioned = false;    ///< a singular value within 100x of the cutoff
  std::string warning;
};
CharacteristicSpaces characteristic_spaces(const DiracStructure& d, const Point& m);

/// Construction A: {(X, alpha) | X in P°, alpha - i_X omega in P}.
DiracStructure graph_of_two_form(const ChartPtr& chart, const std::vector<OneForm>& P, const TwoForm& omega);
/// Construction B: {(X, alpha) | alpha in G°, X - Pi(alpha, .) in G}.
DiracStructure graph_of_bivector(const ChartPtr& chart, const std::vector<VectorField>& G, const Bivector& pi);

/// 2-form omega with D = graph(omega); requires G1 = TM at m.
Eigen::MatrixXd induced_two_form(const DiracStructure& d, const Point& m);
TwoForm induced_two_form_field(const DiracStructure& d);
/// Bivector Pi with D = graph(Pi); requires P1 = T*M at m.
Eigen::MatrixXd induced_bivector(const DiracStructure& d, const Point& m);

struct ClosednessWitness {
  int first = 0;
  int second = 0;
  Point point;
  double residual = 0.0;
};

struct ClosednessResult {
  bool closed = true;
  double max_residual = 0.0;
  std::optional<ClosednessWitness> witness;
};

/// Truncated-bracket closure test of all ordered pairs of spanning sections.
ClosednessResult is_closed(const DiracStructure& d, const std::vector<Point>& points, double tol);
ClosednessResult is_closed(const DiracStructure& d, int samples, std::uint64_t seed, double tol);

struct HamiltonianSolution {
  Eigen::VectorXd X;              ///< minimum-norm solution
  int coset_dim = 0;              ///< dim G0(m)
  bool admissible = false;
  double admissibility_residual = 0.0;
  double energy_residual = 0.0;   ///< |dH(X)|
};

/// Solve (X, dH(m)) in D(m).
HamiltonianSolution solve_implicit_hamiltonian(const DiracStructure& d, const ScalarField& H, const Point& m,
                                               double tol);
HamiltonianSolution solve_implicit_hamiltonian(const DiracStructure& d, const Eigen::VectorXd& dH,
                                               const Point& m, double tol);

struct BracketValue {
  double value = 0.0;      ///< X_g[f]
  double alternate = 0.0;  ///< -X_f[g]
  bool admissible = false;
};
BracketValue dirac_poisson_bracket(const DiracStructure& d, const ScalarField& f, const ScalarField& g,
                                   const Point& m, double tol);

/// Submanifold N given by a chart and an embedding into the chart of D.
struct LevelSet {
  ChartPtr chart;
  PointMap embedding;
  std::vector<ScalarField> functions;  ///< functions on M that are constant on N (may be empty)
};

/// D_N(m) = sigma(D(m) ∩ (T_mN x T*_mM)) by pointwise frames on N.
DiracStructure restrict_to_level_set(const DiracStructure& d, const LevelSet& n, double tol);

/// dim(G1 ∩ TN) at each point; throws RankError naming two points if it varies.
int restriction_rank(const DiracStructure& d, const LevelSet& n, const std::vector<Point>& points, double tol);

}  // namespace dk
