#include "dirackit/analysis.hpp"
#include "dirackit/catalog.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dk;
using dk::test::vec;

namespace {

const CheckRecord& record(const AnalysisReport& r, const std::string& name) {
  const CheckRecord* c = r.find(name);
  REQUIRE_MESSAGE(c != nullptr, name);
  return *c;
}

Eigen::VectorXd stacked(std::initializer_list<double> x, std::initializer_list<double> a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size() + a.size()));
  int i = 0;
  for (double d : x) v(i++) = d;
  for (double d : a) v(i++) = d;
  return v;
}

}  // namespace

TEST_CASE("constraint manifold of the particle") {
  const CatalogEntry e = load("constrained_particle");
  const ConstraintPhase& c = e.model.phase;
  CHECK(c.eliminated == std::vector<std::string>{"p_z"});
  CHECK(c.m_chart->coords() == std::vector<std::string>{"x", "y", "z", "p_x", "p_y"});
  const Point m = vec({0.1, 0.7, -0.3, 1.2, -0.5});
  const Point tq = c.embedding(m);
  CHECK(tq(5) == doctest::Approx(0.7 * 1.2));
  CHECK(constraint_defect(e.model.system, c, m) < 1e-15);
  CHECK(e.model.hamiltonian(m) == doctest::Approx(0.5 * (1.44 + 0.25 + 0.7 * 0.7 * 1.44)));
  const Subspace H = horizontal_H(e.model.system, c, m);
  CHECK(H.dim() == 4);
  CHECK(H.contains(stacked({0.0, 0.0, 0.0}, {1.0, 0.0})));
  CHECK_FALSE(H.contains(stacked({0.0, 0.0, 1.0}, {0.0, 0.0})));
}

TEST_CASE("a singular elimination block names an alternative") {
  const CatalogEntry e = load("constrained_particle");
  try {
    build_constraint_phase(e.model.system, {"p_y"});
    FAIL("expected a singular block");
  } catch (const RankError& err) {
    CHECK(err.stage() == "build_constraint_phase");
    CHECK(std::string(err.what()).find("p_z") != std::string::npos);
  }
  CHECK(best_elimination(e.model.system, {vec({0.0, 0.3, 0.0})}) == std::vector<std::string>{"p_z"});
}

TEST_CASE("metric and constraint checks") {
  const ChartPtr q = make_chart("Q", {"x", "y", "z"}, std::vector<Interval>(3, Interval{-2.0, 2.0}));
  MechanicalSystem ms;
  ms.q_chart = q;
  ms.metric = expression_field(q, parse_all(q, {"1", "0", "0", "0", "-1", "0", "0", "0", "1"}, {}));
  ms.constraints = {OneForm::parse(q, {"-y", "0", "1"})};
  CHECK_FALSE(check_system(ms, sample_points(*q, 8, 1), 1e-9).ok);
  ms.metric = expression_field(q, parse_all(q, {"1", "0", "0", "0", "1", "0", "0", "0", "1"}, {}));
  ms.constraints.push_back(OneForm::parse(q, {"-2*y", "0", "2"}));
  CHECK_FALSE(check_system(ms, sample_points(*q, 8, 1), 1e-9).ok);
}

TEST_CASE("legendre maps are inverse to each other") {
  const CatalogEntry e = load("vertical_disk", {{"I", 2.0}, {"J", 0.5}});
  const Point q = vec({0.3, 1.1, -0.4, 0.2});
  const Eigen::VectorXd v = vec({0.5, -1.0, 0.25, 2.0});
  const Eigen::VectorXd p = legendre(e.model.system, q, v);
  CHECK((inverse_legendre(e.model.system, q, p) - v).norm() < 1e-12);
}

TEST_CASE("cotangent lifts are tangent to M and have momentum maps") {
  for (const char* name : {"constrained_particle", "vertical_disk", "heisenberg_particle"}) {
    const CatalogEntry e = load(name);
    const std::vector<Point> pts = sample_points(*e.model.phase.m_chart, 16, 2);
    for (const ActionEntry& a : e.actions) {
      CAPTURE(a.spec.name);
      CHECK(lift_tangency(e.model.phase, a.lifted, pts, 1e-10).ok);
      CHECK(momentum_map_residual(e.model, a.lifted, pts, 1e-9).ok);
    }
  }
}

TEST_CASE("skate pieces agree with the symbolic oracle at the slice point") {
  const double s = 1.5;
  const CatalogEntry e = load("chaplygin_skate", {{"s", s}, {"m", 2.0}});
  const ActionEntry& a = e.action("SE2");
  const double u = 0.7, w = -0.4;
  const Point m = vec({0.0, 0.0, 0.0, u, w});

  Eigen::MatrixXd W(5, 5);
  W << 0, 0, 0, 0, s, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, -1, 0, 0, 0, -s, 0, -1, 0, 0;
  CHECK((e.model.omega.matrix(m) - W).norm() < 1e-14);

  const Subspace vh = vertical_cap_horizontal(e.model, a.lifted, m, 1e-9);
  CHECK(vh.dim() == 2);
  CHECK(vh.contains(vec({1, 0, 0, -w, u})));
  CHECK(vh.contains(vec({0, 1, 0, 0, 0})));

  const Subspace U = horizontal_annihilator_U(e.model, a.lifted, m, 1e-9);
  CHECK(U.dim() == 2);
  CHECK(U.contains(vec({w / (s * u), 1, 0, 0, 0})));
  CHECK(U.contains(vec({1 / u, 0, 0, 0, 1})));

  const Subspace R = reaction_R(e.model, a.lifted, m, 1e-9);
  CHECK(R.dim() == 1);
  CHECK(R.contains(vec({0, 0, 1, 0, 0})));

  const DiracStructure dr = reduce_dirac(e.model.dirac, a.action(), a.quotient, 1e-9);
  const Subspace f = dr.fiber(vec({u, w}));
  CHECK(f.contains(stacked({w * w / (s * u), -w / s}, {1, w / u})));
  CHECK(f.contains(stacked({-w / u, 0}, {0, -s / u})));
  CHECK(characteristic_spaces(dr, vec({u, w})).G1.dim() == 2);
}

TEST_CASE("rotor pieces agree with the symbolic oracle at the slice point") {
  const double s = 1.0;
  const CatalogEntry e = load("skate_with_rotor", {{"J", 0.5}});
  const ActionEntry& a = e.action("S1xSE2");
  const double pp = 0.3, u = -0.9, w = 0.6;
  const Point m = vec({0, 0, 0, 0, pp, u, w});
  const Subspace U = horizontal_annihilator_U(e.model, a.lifted, m, 1e-9);
  CHECK(U.dim() == 3);
  CHECK(U.contains(vec({1, 0, 0, 0, 0, 0, 0})));
  CHECK(U.contains(vec({0, w / (s * u), 1, 0, 0, 0, 0})));
  CHECK(U.contains(vec({0, 1 / u, 0, 0, 0, 0, 1})));
  const Subspace R = reaction_R(e.model, a.lifted, m, 1e-9);
  CHECK(R.dim() == 1);
  CHECK(R.contains(vec({0, 0, 0, 1, 0, 0, 0})));
  const DiracStructure dr = reduce_dirac(e.model.dirac, a.action(), a.quotient, 1e-9);
  const Subspace f = dr.fiber(vec({pp, u, w}));
  CHECK(f.contains(stacked({0, 0, 0}, {1, 0, 0})));
  CHECK(f.contains(stacked({0, w * w / (s * u), -w / s}, {w / (s * u), 1, w / u})));
  CHECK(f.contains(stacked({0, -w / u, 0}, {-1 / u, 0, -s / u})));
}

TEST_CASE("stated Hamiltonians match the energy on M") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const CatalogEntry e = load(name);
    REQUIRE(e.stated_hamiltonian.has_value());
    for (const Point& m : sample_points(*e.model.phase.m_chart, 16, 3))
      CHECK(e.model.hamiltonian(m) == doctest::Approx((*e.stated_hamiltonian)(m)).epsilon(1e-12));
  }
}

TEST_CASE("disk conservation laws and the S1 criterion") {
  const CatalogEntry e = load("vertical_disk");
  const ActionEntry& a = e.action("S1xR2");
  const std::vector<Point> pts = sample_points(*e.model.phase.m_chart, 24, 4);
  const ConservedVerdict v = conserved_criterion(e.model, a.lifted, {1.0, 0.0, 0.0}, e.model.hamiltonian, pts, 1e-9);
  CHECK(v.criterion);
  CHECK(v.noether.ok);
  CHECK(annihilates_DG(e.model, a.lifted, ScalarField::parse(e.model.phase.m_chart, "p_theta"), pts, 1e-9).ok);
  const ConservedVerdict t = conserved_criterion(e.model, a.lifted, {0.0, 1.0, 0.0}, e.model.hamiltonian, pts, 1e-9);
  CHECK_FALSE(t.criterion);
}

TEST_CASE("literal skate generators on M reproduce the reference reduced data but are not a symmetry") {
  SystemSpec s = catalog_spec("chaplygin_skate");
  ActionSpec a = s.action("SE2");
  a.name = "SE2_on_M";
  a.lifted = false;
  a.generators = {{"1", "-y", "x", "0", "0"}, {"0", "1", "0", "0", "0"}, {"0", "0", "1", "0", "0"}};
  a.quotient = {{"p_x", "p_y"}, {}, {"p_x", "p_y"}, {"0", "0", "0", "p_x", "p_y"}};
  a.expected.criteria.clear();
  a.expected.noether.clear();
  s.actions = {a};
  const AnalysisReport r = run_analysis(build_entry(s), {}, {32, 42, 1e-9});
  CHECK(record(r, "SE2_on_M/action.dirac_invariance").status == CheckStatus::Fail);
  CHECK(record(r, "SE2_on_M/action.momentum_map").status == CheckStatus::Skipped);
  CHECK(record(r, "SE2_on_M/expected.d_red_span").status == CheckStatus::Pass);
  CHECK(record(r, "SE2_on_M/expected.reaction_R").status == CheckStatus::Pass);
  CHECK(record(r, "SE2_on_M/expected.D_G").status == CheckStatus::Pass);
  CHECK(record(r, "SE2_on_M/nonholonomic.conserved[p_x]").status == CheckStatus::Pass);
}
