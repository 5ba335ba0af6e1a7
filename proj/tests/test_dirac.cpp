#include "dirackit/dirac.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dk;
using dk::test::vec;

namespace {

ChartPtr t_star_r() { return make_chart("T*R", {"q", "p_q"}, {{-2, 2}, {-2, 2}}); }
ChartPtr t_star_r2() { return make_chart("T*R2", {"x", "y", "p_x", "p_y"}, {{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}}); }
ChartPtr r3() { return make_chart("R3", {"x", "y", "z"}, {{-2, 2}, {-2, 2}, {-2, 2}}); }

}  // namespace

TEST_CASE("graph of the canonical form gives the canonical bracket") {
  const ChartPtr c = t_star_r();
  const DiracStructure d = graph_of_two_form(c, {}, canonical_two_form(c));
  const Point m = vec({0.3, -0.4});
  const BracketValue b = dirac_poisson_bracket(d, ScalarField::coordinate(c, 0), ScalarField::coordinate(c, 1), m, 1e-9);
  CHECK(b.admissible);
  CHECK(b.value == doctest::Approx(1.0));
  CHECK(b.alternate == doctest::Approx(1.0));
  CHECK(is_closed(d, 32, 1, 1e-8).closed);
}

TEST_CASE("harmonic oscillator vector field solves the implicit system") {
  const ChartPtr c = t_star_r();
  const DiracStructure d = graph_of_two_form(c, {}, canonical_two_form(c));
  const ScalarField H = ScalarField::parse(c, "(q^2 + p_q^2)/2");
  const Point m = vec({0.7, -1.2});
  const HamiltonianSolution s = solve_implicit_hamiltonian(d, H, m, 1e-9);
  REQUIRE(s.admissible);
  CHECK(s.coset_dim == 0);
  CHECK(s.X(0) == doctest::Approx(-1.2));
  CHECK(s.X(1) == doctest::Approx(-0.7));
  CHECK(s.energy_residual < 1e-14);
}

TEST_CASE("graphs are Lagrangian with the expected characteristic spaces") {
  const ChartPtr c = r3();
  // presymplectic: constraint dz, form x dx^y
  const TwoForm w = TwoForm::from_wedges(c, {{"x", "y", "1+x^2"}});
  const DiracStructure d = graph_of_two_form(c, {OneForm::coordinate(c, 2)}, w);
  const Point m = vec({0.2, 0.5, -0.1});
  const LagrangianDefect ld = lagrangian_defect(d, m);
  CHECK(ld.rank == 3);
  CHECK(ld.max_pairing < 1e-14);
  const CharacteristicSpaces cs = characteristic_spaces(d, m);
  CHECK(cs.identities_hold);
  CHECK(cs.G1.dim() == 2);
  CHECK(cs.G0.dim() == 0);
  CHECK(cs.P0.dim() == 1);
  CHECK(cs.P1.dim() == 3);
  CHECK_THROWS_AS(induced_two_form(d, m), RankError);

  const Bivector pi = Bivector::from_wedges(c, {{"x", "y", "z"}, {"y", "z", "1"}});
  const DiracStructure db = graph_of_bivector(c, {}, pi);
  CHECK(lagrangian_defect(db, m).max_pairing < 1e-14);
  CHECK((induced_bivector(db, m) - pi.matrix(m)).norm() < 1e-12);
  const CharacteristicSpaces cb = characteristic_spaces(db, m);
  CHECK(cb.identities_hold);
  CHECK(cb.G0.dim() == 0);
  CHECK(cb.P0.dim() == 1);
  CHECK(cb.G1.dim() == 2);
  CHECK(cb.P1.dim() == 3);
}

TEST_CASE("induced form recovers the generating form") {
  const ChartPtr c = t_star_r2();
  const TwoForm w = TwoForm::from_wedges(c, {{"x", "p_x", "1"}, {"y", "p_y", "1"}, {"x", "y", "p_x*p_y"}});
  const DiracStructure d = graph_of_two_form(c, {}, w);
  const Point m = vec({0.1, 0.2, 0.3, 0.4});
  CHECK((induced_two_form(d, m) - w.matrix(m)).norm() < 1e-12);
}

TEST_CASE("closedness detects a non-closed form with a witness") {
  const ChartPtr c = make_chart("R4", {"a", "b", "c", "d"}, {{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}});
  const TwoForm closed = TwoForm::from_wedges(c, {{"a", "b", "1"}, {"c", "d", "1+c^2"}});
  const TwoForm open = TwoForm::from_wedges(c, {{"a", "b", "1"}, {"c", "d", "1+b^2"}, {"b", "c", "a"}});
  CHECK(is_closed(graph_of_two_form(c, {}, closed), 64, 2, 1e-8).closed);
  const ClosednessResult r = is_closed(graph_of_two_form(c, {}, open), 64, 2, 1e-8);
  CHECK_FALSE(r.closed);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->residual > 1e-3);
}

TEST_CASE("Courant bracket and the skew correction differ by half d of the pairing") {
  const ChartPtr c = r3();
  const PontryaginSection a(VectorField::parse(c, {"y", "z", "x"}), OneForm::parse(c, {"z^2", "0", "x*y"}));
  const PontryaginSection b(VectorField::parse(c, {"1", "x", "0"}), OneForm::parse(c, {"y", "x", "z"}));
  const Point m = vec({0.3, -0.2, 0.8});
  const PontryaginSection full = courant_bracket(a, b, false);
  const PontryaginSection skew = courant_bracket(a, b, true);
  CHECK((full.vector_part.values(m) - skew.vector_part.values(m)).norm() < 1e-14);
  const Jet pair = pontryagin_pairing(a.eval(m), b.eval(m));
  const Eigen::VectorXd diff = full.form_part.values(m) - skew.form_part.values(m);
  CHECK((diff - 0.5 * pair.grad()).norm() < 1e-12);
}

TEST_CASE("restriction to a momentum level") {
  const ChartPtr c = t_star_r2();
  const DiracStructure d = graph_of_two_form(c, {}, canonical_two_form(c));
  const ChartPtr nc = make_chart("N", {"x", "y", "p_x"}, {{-2, 2}, {-2, 2}, {-2, 2}});
  LevelSet n{nc, PointMap::parse(nc, c, {"x", "y", "p_x", "1"}), {ScalarField::coordinate(c, 3)}};
  const DiracStructure dn = restrict_to_level_set(d, n, 1e-9);
  const Point x = vec({0.5, -0.5, 1.0});
  const Subspace f = dn.fiber(x);
  Eigen::VectorXd y_dir = Eigen::VectorXd::Zero(6);
  y_dir(1) = 1.0;  // (d/dy, 0): the kernel direction of dx ^ dp_x
  CHECK(f.contains(y_dir));
  Eigen::VectorXd x_dir = Eigen::VectorXd::Zero(6);
  x_dir(0) = 1.0;
  x_dir(5) = 1.0;  // (d/dx, dp_x)
  CHECK(f.contains(x_dir));
  CHECK(lagrangian_defect(dn, x).max_pairing < 1e-14);
  CHECK(restriction_rank(d, n, sample_points(*nc, 16, 3), 1e-9) == 3);
}
