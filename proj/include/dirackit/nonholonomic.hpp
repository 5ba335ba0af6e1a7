#pragma once

#include "dirackit/check.hpp"
#include "dirackit/dirac.hpp"
#include "dirackit/symmetry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dk {

/// Kinetic-minus-potential system on Q with linear velocity constraints.
struct MechanicalSystem {
  std::string name;
  ChartPtr q_chart;
  Field metric;                        ///< d x d, row-major
  ScalarField potential;               ///< empty field means zero
  std::vector<OneForm> constraints;    ///< phi^1 .. phi^k on Q

  int dim() const { return q_chart->dim(); }
  Eigen::MatrixXd metric_at(const Point& q) const;
};

/// Metric symmetric positive definite and constraints pointwise independent.
CheckOutcome check_system(const MechanicalSystem& s, const std::vector<Point>& q_points, double tol);

/// p = g(q) v
Eigen::VectorXd legendre(const MechanicalSystem& s, const Point& q, const Eigen::VectorXd& v);
/// v = g(q)^-1 p
Eigen::VectorXd inverse_legendre(const MechanicalSystem& s, const Point& q, const Eigen::VectorXd& p);

/// Name of the momentum conjugate to a configuration coordinate.
std::string momentum_name(const std::string& coord);

/// Chart on T*Q ordered (q, p) with momenta boxed in [-bound, bound].
ChartPtr cotangent_chart(const ChartPtr& q_chart, double bound = 2.0);

/// The constraint manifold M with its embedding into T*Q.
struct ConstraintPhase {
  ChartPtr m_chart;                     ///< coordinates (q, free momenta)
  ChartPtr tq_chart;                    ///< coordinates (q, p)
  PointMap embedding;                   ///< M -> T*Q
  PointMap base_projection;             ///< M -> Q
  std::vector<std::string> eliminated;  ///< dependent momenta
  int q_dim = 0;
};

/// Elimination choice with the best worst-case conditioning of the k x k block over the points.
std::vector<std::string> best_elimination(const MechanicalSystem& s, const std::vector<Point>& q_points);

/**
 * Builds M by expressing the eliminated momenta through phi(g^-1 p) = 0.
 * An empty list selects the best-conditioned block.  A singular block at a
 * sample throws RankError naming a better-conditioned alternative.
 */
ConstraintPhase build_constraint_phase(const MechanicalSystem& s, const std::vector<std::string>& eliminate,
                                       int check_samples = 32, std::uint64_t seed = 42);

/// max_j |phi^j(g^-1 p)| at the embedded point.
double constraint_defect(const MechanicalSystem& s, const ConstraintPhase& c, const Point& m);

/// Pullback of the canonical 2-form, sum_i (dq^i ^ dp_i) through the embedding.
TwoForm omega_M(const ConstraintPhase& c);
/// Pullbacks of the constraint forms to M; they span the annihilator of H.
std::vector<OneForm> horizontal_annihilator_forms(const MechanicalSystem& s, const ConstraintPhase& c);
/// H(m) = kernel of the pulled-back constraint forms.
Subspace horizontal_H(const MechanicalSystem& s, const ConstraintPhase& c, const Point& m);
/// Energy 1/2 p.g^-1 p + V on M.
ScalarField hamiltonian(const MechanicalSystem& s, const ConstraintPhase& c);

/// Everything built once per system and shared by the analyses.
struct NonholonomicModel {
  MechanicalSystem system;
  ConstraintPhase phase;
  TwoForm omega;
  std::vector<OneForm> beta;
  DiracStructure dirac;
  ScalarField hamiltonian;
};

NonholonomicModel build_model(const MechanicalSystem& s, const std::vector<std::string>& eliminate);

/// The nonholonomic Dirac structure {(X, alpha) : X in H, alpha - i_X omega_M in H°}.
DiracStructure nonholonomic_dirac(const MechanicalSystem& s, const ConstraintPhase& c);

/// Throws RankError if omega_M restricted to H is degenerate at a sample.
void require_nondegenerate_omega_H(const NonholonomicModel& model, const std::vector<Point>& points, double tol);
/// Smallest relative singular value of omega_M on H at m.
double omega_H_conditioning(const NonholonomicModel& model, const Point& m);

/// Cotangent lift of base generators: the action on M with its base data.
struct LiftedAction {
  SymmetryAction action;
  std::vector<VectorField> base_generators;
};

LiftedAction lifted_action(const ConstraintPhase& c, const std::string& name, const std::vector<VectorField>& base,
                           const std::vector<double>& structure_constants = {});

/// T(embedding) xi_M against the canonical cotangent lift at the embedded point.
CheckOutcome lift_tangency(const ConstraintPhase& c, const LiftedAction& l, const std::vector<Point>& points, double tol);

/// J^xi = <p, xi_Q>, xi given by coefficients against the generator basis.
ScalarField momentum_field(const ConstraintPhase& c, const LiftedAction& l, const std::vector<double>& xi);
double momentum_component(const ConstraintPhase& c, const LiftedAction& l, const std::vector<double>& xi,
                          const Point& m);
/// || i_{xi_M} omega_M - dJ^xi || over every generator.
CheckOutcome momentum_map_residual(const NonholonomicModel& model, const LiftedAction& l,
                                   const std::vector<Point>& points, double tol);

/// V ∩ H at m.
Subspace vertical_cap_horizontal(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);
/// U(m) = (V ∩ H)^omega ∩ H.
Subspace horizontal_annihilator_U(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);
/// Jets of a local frame of U.
std::vector<JetList> u_frame(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);

/// D ∩ K-perp built from U-sections and their H°-corrections.
struct UCompletion {
  SectionList sections;
  std::vector<JetList> corrections;
};
UCompletion d_cap_k_perp_via_U(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);

/// Reaction codistribution: span of the H°-corrections.
Subspace reaction_R(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);

/// flat(U) + R direct and equal to V° + R.
CheckOutcome check_flat_U_plus_R(const NonholonomicModel& model, const LiftedAction& l,
                                 const std::vector<Point>& points, double tol);

/// Where H + V = TM: two independently weighted solves of the V°-completion agree.
CheckOutcome completion_uniqueness(const NonholonomicModel& model, const LiftedAction& l,
                                   const std::vector<Point>& points, std::uint64_t seed, double tol);

/// Hbar = T pi(U) at the slice point above mbar.
Subspace h_bar(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q, const Point& mbar,
               double tol);
/// omega_Hbar(Xbar, Ybar) through lifts to U; throws InputError if an argument is not in Hbar.
double omega_h_bar(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q, const Point& mbar,
                   const Eigen::VectorXd& xbar, const Eigen::VectorXd& ybar, double tol);
/// G1 of D_red equals Hbar, omega_Hbar is nondegenerate and matches the form parts of D_red.
CheckOutcome check_omega_h_bar(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q,
                               const DiracStructure& d_red, const std::vector<Point>& reduced_points, double tol);

/// g^H(m) = {xi : xi_M(m) in V ∩ H} as a subspace of the Lie algebra.
Subspace g_H_fiber(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);
/// alpha = sum_i f_i dJ^{xi_i} at m.
Eigen::VectorXd noether_one_form(const ConstraintPhase& c, const LiftedAction& l, const std::vector<ScalarField>& f,
                                 const Point& m);
/// (sum f_i xi_i, alpha) in D at every sample.
CheckOutcome noether_pair_in_D(const NonholonomicModel& model, const LiftedAction& l,
                               const std::vector<ScalarField>& f, const std::vector<Point>& points, double tol);
/// dJ^{xi^H}(X_H) - J^{X_H[xi^H]} at m; throws InputError if H is not invariant there.
double noether_residual(const NonholonomicModel& model, const LiftedAction& l, const ScalarField& H,
                        const std::vector<ScalarField>& f, const Point& m, double tol);

struct ConservedVerdict {
  bool criterion = false;     ///< xi_M in V ∩ R° at every sample
  CheckOutcome annihilation;  ///< residual of R(xi_M)
  CheckOutcome noether;       ///< Noether residual with the constant section (checked when the criterion holds)
};
ConservedVerdict conserved_criterion(const NonholonomicModel& model, const LiftedAction& l,
                                     const std::vector<double>& xi, const ScalarField& H,
                                     const std::vector<Point>& points, double tol);

/// D_G = U + V at m.
Subspace optimal_distribution_DG(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol);
/// Sampled dimension of H + V; throws RankError naming two points if it varies.
int horizontal_plus_vertical_rank(const NonholonomicModel& model, const LiftedAction& l,
                                  const std::vector<Point>& points, double tol);
/// Brackets of the spanning fields of U and V stay in D_G.
CheckOutcome is_involutive_DG(const NonholonomicModel& model, const LiftedAction& l, const std::vector<Point>& points,
                              double tol);
/// df vanishes on D_G, relative to |df|.
CheckOutcome annihilates_DG(const NonholonomicModel& model, const LiftedAction& l, const ScalarField& f,
                            const std::vector<Point>& points, double tol);

/// Level set of conserved functions with its residual symmetry and quotient.
struct Leaf {
  LevelSet level;
  SymmetryAction action;
  QuotientChart quotient;
};

/// Restrict to the leaf, then reduce by the leaf action.
DiracStructure leaf_reduce(const DiracStructure& d, const Leaf& leaf, double tol);

/// (pi_rho^* omega_rho)(X, Y) = alpha(Y) over pairs of D ∩ K-perp at leaf points.
CheckOutcome leaf_form_agreement(const DiracStructure& d, const SymmetryAction& a, const Leaf& leaf,
                                 const DiracStructure& d_rho, const std::vector<Point>& reduced_points, double tol);

/// {h, k}_D at leaf points equals {h_rho, k_rho} on the reduced leaf.
CheckOutcome reduced_bracket_identity(const DiracStructure& d, const Leaf& leaf, const DiracStructure& d_rho,
                                      const ScalarField& h, const ScalarField& k,
                                      const std::vector<Point>& reduced_points, double tol);

}  // namespace dk
