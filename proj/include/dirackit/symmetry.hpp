#pragma once

#include "dirackit/check.hpp"
#include "dirackit/dirac.hpp"

#include <string>
#include <vector>

namespace dk {

/**
 * Infinitesimal action of a k-dimensional Lie algebra on a chart.
 *
 * Structure constants follow [xi^i_M, xi^j_M] = -sum_l c^l_ij xi^l_M and are
 * stored flat as c[(l * k + i) * k + j]; an empty list means abelian.
 */
struct SymmetryAction {
  std::string name;
  ChartPtr chart;
  std::vector<VectorField> generators;
  std::vector<double> structure_constants;

  int size() const { return static_cast<int>(generators.size()); }
  double c(int l, int i, int j) const;
  /// Jets of every generator at m.
  std::vector<JetList> generator_jets(const Point& m) const;
  /// n x k matrix of generator values at m.
  Eigen::MatrixXd generator_matrix(const Point& m) const;
};

/// Quotient M -> M/G realized by invariant coordinate functions and a slice.
struct QuotientChart {
  ChartPtr reduced;
  PointMap projection;  ///< M -> reduced chart
  PointMap slice;       ///< reduced chart -> M
};

/// Composition outer o inner of two maps.
PointMap compose_maps(const PointMap& outer, const PointMap& inner);

/// span of the generator values; throws RankError when they are dependent at m.
Subspace vertical_space(const SymmetryAction& a, const Point& m);

/// Bracket relations of the generators against the structure constants.
CheckOutcome check_structure_constants(const SymmetryAction& a, const std::vector<Point>& points, double tol);

/// (L_xi X, L_xi alpha) in D for every generator and spanning section.
CheckOutcome check_dirac_invariance(const DiracStructure& d, const SymmetryAction& a, const std::vector<Point>& points,
                                    double tol);

/// Projection invariance, pi o sigma = id and full rank of T pi at slice points.
CheckOutcome validate_quotient(const SymmetryAction& a, const QuotientChart& q, const std::vector<Point>& reduced_points,
                               const std::vector<Point>& points, double tol);

/// Jets of a frame of D ∩ (TM + V°) at m: kernel of alpha_i(xi_a) over the spanning sections of D.
SectionList d_cap_k_perp_sections(const DiracStructure& d, const SymmetryAction& a, const Point& m, double tol);
/// The fiber of D ∩ K-perp at m inside R^2n.
Subspace d_cap_k_perp_fiber(const DiracStructure& d, const SymmetryAction& a, const Point& m, double tol);

/// Sampled rank of D ∩ K-perp; throws RankError naming two points if it varies.
int d_cap_k_perp_rank(const DiracStructure& d, const SymmetryAction& a, const std::vector<Point>& points, double tol);

/// Reduced Dirac structure on the quotient chart (method A).
DiracStructure reduce_dirac(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q, double tol);

/**
 * Recomputes the reduced covectors through a second right inverse
 * T sigma + W Z of T pi (W the generator matrix, Z random) and returns the
 * largest relative deviation from the slice-based values.
 */
double right_inverse_deviation(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q,
                               const std::vector<Point>& reduced_points, std::uint64_t seed, double tol);

/// Method B: both containments between D_red and the pushed-down structure.
CheckOutcome verify_method_b(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q,
                             const DiracStructure& d_red, const std::vector<Point>& reduced_points, double tol);

/// [X, xi_a](m) in V(m) at every sample.
CheckOutcome is_descending_field(const VectorField& X, const SymmetryAction& a, const std::vector<Point>& points,
                                 double tol);

/// T pi (G0(sigma(mbar))) inside G0 of the reduced structure.
CheckOutcome g0_pushdown(const DiracStructure& d, const QuotientChart& q, const DiracStructure& d_red,
                         const std::vector<Point>& reduced_points, double tol);

/// pi_1(D ∩ K-perp)(m): the optimal distribution of a closed Dirac structure.
Subspace closed_optimal_distribution(const DiracStructure& d, const SymmetryAction& a, const Point& m, double tol);

}  // namespace dk
