#include "dirackit/catalog.hpp"
#include "dirackit/symmetry.hpp"
#include "dirackit/verification.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dk;
using dk::test::vec;

namespace {

const Interval kBox{-2.0, 2.0};

ChartPtr t_star_r2() { return make_chart("T*R2", {"x", "y", "p_x", "p_y"}, std::vector<Interval>(4, kBox)); }

struct Translation {
  ChartPtr chart = t_star_r2();
  ChartPtr reduced = make_chart("T*R2/R", {"y", "p_x", "p_y"}, std::vector<Interval>(3, kBox));
  SymmetryAction action{"R", chart, {VectorField::coordinate(chart, 0)}, {}};
  QuotientChart quotient{reduced, PointMap::parse(chart, reduced, {"y", "p_x", "p_y"}),
                         PointMap::parse(reduced, chart, {"0", "y", "p_x", "p_y"})};
  DiracStructure d = graph_of_two_form(chart, {}, canonical_two_form(chart));
};

}  // namespace

TEST_CASE("translation reduction of T*R2 is the Poisson structure with p_x as Casimir") {
  const Translation t;
  const std::vector<Point> pts = sample_points(*t.chart, 32, 1);
  const std::vector<Point> rpts = sample_points(*t.reduced, 32, 2);
  CHECK(check_dirac_invariance(t.d, t.action, pts, 1e-8).ok);
  CHECK(validate_quotient(t.action, t.quotient, rpts, pts, 1e-10).ok);
  CHECK(d_cap_k_perp_rank(t.d, t.action, pts, 1e-9) == 3);

  const DiracStructure dr = reduce_dirac(t.d, t.action, t.quotient, 1e-9);
  const Point mb = vec({0.4, -1.0, 0.8});
  const CharacteristicSpaces cs = characteristic_spaces(dr, mb);
  CHECK(cs.identities_hold);
  CHECK(cs.P0.dim() == 1);
  CHECK(cs.P0.contains(Eigen::Vector3d(0, 1, 0)));
  const BracketValue b = dirac_poisson_bracket(dr, ScalarField::coordinate(t.reduced, 0),
                                               ScalarField::coordinate(t.reduced, 2), mb, 1e-9);
  CHECK(b.admissible);
  CHECK(b.value == doctest::Approx(1.0));
  CHECK(lagrangian_defect(dr, mb).max_pairing < 1e-14);
  CHECK(is_closed(dr, rpts, 1e-8).closed);

  CHECK(verify_method_b(t.d, t.action, t.quotient, dr, rpts, 1e-8).ok);
  CHECK(right_inverse_deviation(t.d, t.action, t.quotient, rpts, 5, 1e-9) < 1e-9);
  CHECK(g0_pushdown(t.d, t.quotient, dr, rpts, 1e-9).ok);
}

TEST_CASE("lifted rotations satisfy the se(2) relations and preserve the canonical structure") {
  const ChartPtr c = t_star_r2();
  const SymmetryAction se2{"SE2",
                           c,
                           {VectorField::parse(c, {"-y", "x", "-p_y", "p_x"}), VectorField::coordinate(c, 0),
                            VectorField::coordinate(c, 1)},
                           structure_constants(3, {{2, 0, 1, 1.0}, {1, 0, 2, -1.0}})};
  const std::vector<Point> pts = sample_points(*c, 32, 3);
  CHECK(check_structure_constants(se2, pts, 1e-10).ok);
  CHECK(check_dirac_invariance(graph_of_two_form(c, {}, canonical_two_form(c)), se2, pts, 1e-8).ok);

  SymmetryAction wrong = se2;
  wrong.structure_constants = {};
  const CheckOutcome bad = check_structure_constants(wrong, pts, 1e-10);
  CHECK_FALSE(bad.ok);
  CHECK(bad.witness.has_value());
}

TEST_CASE("structure constants are antisymmetrized") {
  const std::vector<double> c = structure_constants(3, {{2, 0, 1, 1.0}});
  CHECK(c[(2 * 3 + 0) * 3 + 1] == 1.0);
  CHECK(c[(2 * 3 + 1) * 3 + 0] == -1.0);
  CHECK(c.size() == 27);
}

TEST_CASE("non-invariant structures and projections are detected") {
  Translation t;
  const std::vector<Point> pts = sample_points(*t.chart, 32, 4);
  const DiracStructure skewed = graph_of_two_form(
      t.chart, {}, TwoForm::from_wedges(t.chart, {{"x", "p_x", "1+x^2"}, {"y", "p_y", "1"}}));
  CHECK_FALSE(check_dirac_invariance(skewed, t.action, pts, 1e-8).ok);

  QuotientChart bad = t.quotient;
  bad.projection = PointMap::parse(t.chart, t.reduced, {"y+x", "p_x", "p_y"});
  CHECK_FALSE(validate_quotient(t.action, bad, sample_points(*t.reduced, 16, 5), pts, 1e-10).ok);
}

TEST_CASE("dependent generators and rank jumps raise RankError") {
  const ChartPtr c = t_star_r2();
  const SymmetryAction dup{"dup", c, {VectorField::coordinate(c, 0), VectorField::parse(c, {"2", "0", "0", "0"})}, {}};
  CHECK_THROWS_AS(vertical_space(dup, vec({0, 0, 0, 0})), RankError);

  const ChartPtr r2 = make_chart("R2", {"x", "y"}, std::vector<Interval>(2, kBox));
  const DiracStructure d = graph_of_two_form(r2, {OneForm::parse(r2, {"1", "x"})}, TwoForm::zero(r2));
  const SymmetryAction ty{"Ty", r2, {VectorField::coordinate(r2, 1)}, {}};
  try {
    d_cap_k_perp_rank(d, ty, {vec({0.5, 0.1}), vec({0.0, 0.3})}, 1e-9);
    FAIL("expected a rank jump");
  } catch (const RankError& e) {
    CHECK(std::string(e.what()).find("(") != std::string::npos);
  }
}

TEST_CASE("descending fields") {
  const Translation t;
  const std::vector<Point> pts = sample_points(*t.chart, 16, 6);
  CHECK(is_descending_field(VectorField::coordinate(t.chart, 1), t.action, pts, 1e-10).ok);
  CHECK_FALSE(is_descending_field(VectorField::parse(t.chart, {"0", "x", "0", "0"}), t.action, pts, 1e-10).ok);
}

TEST_CASE("reductions of closed structures stay closed") {
  CHECK(closedness_preservation_suite(48, 9, 1e-9).ok);
}
