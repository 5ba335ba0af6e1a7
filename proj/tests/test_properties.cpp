#include "dirackit/analysis.hpp"
#include "dirackit/verification.hpp"

#include <doctest.h>

#include <sstream>

using namespace dk;

namespace {

const Interval kBox{-1.5, 1.5};

std::string random_poly(Sampler& s, const std::vector<std::string>& vars) {
  std::ostringstream os;
  os.precision(17);
  os << s.uniform(-1, 1);
  for (int t = 0; t < 3; ++t) {
    os << " + " << s.uniform(-1, 1);
    for (const auto& v : vars)
      if (s.uniform() < 0.5) os << "*" << v;
  }
  return os.str();
}

std::vector<WedgeTerm> random_wedges(Sampler& s, const std::vector<std::string>& vars) {
  std::vector<WedgeTerm> out;
  for (std::size_t a = 0; a < vars.size(); ++a)
    for (std::size_t b = a + 1; b < vars.size(); ++b) out.push_back({vars[a], vars[b], random_poly(s, vars)});
  return out;
}

}  // namespace

TEST_CASE("random graphs of forms and bivectors are Lagrangian with consistent characteristic spaces") {
  const std::vector<std::string> vars = {"a", "b", "c", "d", "e"};
  const ChartPtr c = make_chart("R5", vars, std::vector<Interval>(5, kBox));
  Sampler s(2024);
  for (int trial = 0; trial < 40; ++trial) {
    CAPTURE(trial);
    const TwoForm w = TwoForm::from_wedges(c, random_wedges(s, vars));
    const int k = trial % 3;
    std::vector<OneForm> P;
    for (int i = 0; i < k; ++i) {
      std::vector<std::string> comps(5, "0");
      comps[static_cast<std::size_t>(i)] = "1";
      comps[4] = random_poly(s, vars);
      P.push_back(OneForm::parse(c, comps));
    }
    const DiracStructure dw = graph_of_two_form(c, P, w);
    const DiracStructure dp = graph_of_bivector(c, {}, Bivector::from_wedges(c, random_wedges(s, vars)));
    for (const Point& m : sample_points(*c, 4, static_cast<std::uint64_t>(trial))) {
      for (const DiracStructure* d : {&dw, &dp}) {
        const LagrangianDefect ld = lagrangian_defect(*d, m);
        CHECK(ld.rank == 5);
        CHECK(ld.max_pairing < 1e-12);
        const CharacteristicSpaces cs = characteristic_spaces(*d, m);
        CHECK(cs.identities_hold);
        CHECK(cs.G0.dim() + cs.P1.dim() == 5);
        CHECK(cs.P0.dim() + cs.G1.dim() == 5);
      }
      CHECK(characteristic_spaces(dw, m).G1.dim() == 5 - k);
    }
  }
}

TEST_CASE("Jacobi identity and d^2 = 0 on random polynomial data") {
  CHECK(jacobi_suite(100, 17, 1e-8).ok);
  CHECK(dd_suite(100, 17, 1e-8).ok);
}

TEST_CASE("Dirac-Poisson brackets are antisymmetric on the catalog") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const CatalogEntry e = load(name);
    const ChartPtr& m = e.model.phase.m_chart;
    Sampler s(99);
    for (const Point& x : sample_points(*m, 6, 8)) {
      const ScalarField f = ScalarField::parse(m, random_poly(s, m->coords()));
      const ScalarField g = ScalarField::parse(m, random_poly(s, m->coords()));
      const BracketValue fg = dirac_poisson_bracket(e.model.dirac, f, g, x, 1e-9);
      const BracketValue gf = dirac_poisson_bracket(e.model.dirac, g, f, x, 1e-9);
      REQUIRE(fg.admissible);
      CHECK(fg.value == doctest::Approx(-gf.value).epsilon(1e-9).scale(1.0));
      CHECK(fg.value == doctest::Approx(fg.alternate).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("catalog invariants hold for several seeds") {
  for (std::uint64_t seed : {1u, 77u, 4096u}) {
    for (const auto& name : catalog_names()) {
      CAPTURE(name);
      CAPTURE(seed);
      const AnalysisReport r = run_analysis(load(name), {}, {24, seed, 1e-9});
      for (const auto& c : r.checks) {
        const bool invariant = c.name.find("lagrangian") != std::string::npos ||
                               c.name.find("characteristic") != std::string::npos ||
                               c.name.find("method_b") != std::string::npos ||
                               c.name.find("energy_conservation") != std::string::npos ||
                               c.name.find("right_inverse_independence") != std::string::npos ||
                               c.name.find("flat_U_plus_R") != std::string::npos ||
                               c.name.find("momentum_map") != std::string::npos ||
                               c.name.find("lift_tangency") != std::string::npos;
        if (!invariant) continue;
        CAPTURE(c.name);
        CHECK(c.status == CheckStatus::Pass);
      }
    }
  }
}

TEST_CASE("reports depend only on the inputs") {
  CatalogRuns a(AnalysisOptions{16, 8, 1e-9});
  const CriterionResult r = run_criterion("determinism", a);
  CHECK(r.passed);
  CHECK(r.lines.size() == catalog_names().size());
}
