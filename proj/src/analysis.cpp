#include "dirackit/analysis.hpp"

#include "dirackit/errors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dk {

using ojson = nlohmann::ordered_json;

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::ExpectedFail: return "expected-fail";
    case CheckStatus::Info: return "info";
  }
  return "unknown";
}

const CheckRecord* AnalysisReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool AnalysisReport::all_passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

Subspace span_from_spec(const SpanSpec& s, const NonholonomicModel& model, const std::vector<Field>& elements,
                        const Point& m, double tol) {
  const int n = model.phase.m_chart->dim();
  if (s.kind == "zero") return Subspace::zero(n, tol);
  if (s.kind == "full") return Subspace::full(n, tol);
  if (s.kind == "horizontal") return horizontal_H(model.system, model.phase, m);
  if (s.kind == "annihilator_H") return annihilator(horizontal_H(model.system, model.phase, m));
  Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = elements[i].values(m);
  if (s.kind == "elements") return Subspace(n, cols, tol);
  if (s.kind == "kernel") {
    if (elements.empty()) return Subspace::full(n, tol);
    return Subspace(n, null_space(cols.transpose(), tol), tol);
  }
  throw InputError("unknown span kind '" + s.kind + "'");
}

DiracStructure structure_from_spec(const StructureSpec& s, const ChartPtr& chart, const ParamMap& params) {
  if (s.kind == "two_form") return graph_of_two_form(chart, {}, TwoForm::from_wedges(chart, s.wedges, params));
  if (s.kind == "bivector") return graph_of_bivector(chart, {}, Bivector::from_wedges(chart, s.wedges, params));
  if (static_cast<int>(s.sections.size()) != chart->dim())
    throw DimensionError("expected structure on " + chart->name() + " needs " + std::to_string(chart->dim()) +
                         " sections");
  std::vector<PontryaginSection> secs;
  for (const auto& sec : s.sections)
    secs.emplace_back(VectorField::parse(chart, sec.vec, params), OneForm::parse(chart, sec.form, params));
  return DiracStructure(secs);
}

namespace {

double loose(double tol) { return std::max(tol, 1e-8); }

double relative_error(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::string format_coeffs(const std::vector<double>& xi) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < xi.size(); ++i) os << (i ? "," : "") << xi[i];
  return os.str();
}

ojson point_json(const Point& p, const std::vector<std::string>& coords) {
  ojson j = ojson::object();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const std::string key = static_cast<std::size_t>(i) < coords.size() ? coords[static_cast<std::size_t>(i)]
                                                                          : "x" + std::to_string(i);
    j[key] = p(i);
  }
  return j;
}

class Recorder {
 public:
  Recorder(AnalysisReport& r, std::string scope) : r_(r), scope_(std::move(scope)) {}

  CheckRecord& add(const std::string& name, CheckStatus st, double residual, const std::string& detail) {
    CheckRecord c;
    c.name = scope_ + "/" + name;
    c.status = st;
    c.max_residual = residual;
    c.detail = detail;
    r_.checks.push_back(std::move(c));
    return r_.checks.back();
  }

  /// expect_failure: the property is meant not to hold, a failing outcome is the expected result.
  void outcome(const std::string& name, const CheckOutcome& o, const ChartPtr& chart, bool expect_failure = false) {
    CheckStatus st;
    std::string detail = o.detail;
    if (expect_failure) {
      st = o.ok ? CheckStatus::Fail : CheckStatus::ExpectedFail;
      if (o.ok) detail = "expected to fail but held at every sample";
    } else {
      st = o.ok ? CheckStatus::Pass : CheckStatus::Fail;
    }
    CheckRecord& c = add(name, st, o.max_residual, detail);
    if (o.witness) {
      c.witness = o.witness;
      c.witness_coords = chart->coords();
    }
  }

  void info(const std::string& name, const std::string& detail, double value = 0.0) {
    add(name, CheckStatus::Info, value, detail);
  }
  void skip(const std::string& name, const std::string& why) { add(name, CheckStatus::Skipped, 0.0, why); }

  /// Runs a check; input errors raised inside become a failed record, rank errors abort.
  template <class F>
  void guard(const std::string& name, const ChartPtr& chart, F&& f, bool expect_failure = false) {
    try {
      outcome(name, f(), chart, expect_failure);
    } catch (const RankError&) {
      throw;
    } catch (const Error& e) {
      add(name, CheckStatus::Fail, 0.0, e.what());
    }
  }

 private:
  AnalysisReport& r_;
  std::string scope_;
};

CheckOutcome compare_fibers(const DiracStructure& got, const DiracStructure& want, const std::vector<Point>& points,
                            double tol) {
  CheckOutcome out;
  for (const Point& x : points) {
    const Eigen::MatrixXd a = got.fiber_matrix(x);
    const Eigen::MatrixXd b = want.fiber_matrix(x);
    const Subspace sa(static_cast<int>(a.rows()), a, tol);
    const Subspace sb(static_cast<int>(b.rows()), b, tol);
    if (sa.dim() != sb.dim()) {
      out.record(1.0, x, tol, "dimension " + std::to_string(sa.dim()) + " differs from " + std::to_string(sb.dim()));
      continue;
    }
    const double r = std::max(containment_residual(sa, b), containment_residual(sb, a));
    out.record(r, x, tol, "computed span differs from the reference span");
  }
  return out;
}

CheckOutcome compare_subspaces(const std::function<Subspace(const Point&)>& got,
                               const std::function<Subspace(const Point&)>& want, const std::vector<Point>& points,
                               double tol) {
  CheckOutcome out;
  for (const Point& m : points) {
    const Subspace a = got(m);
    const Subspace b = want(m);
    if (a.dim() != b.dim()) {
      out.record(1.0, m, tol, "dimension " + std::to_string(a.dim()) + " differs from " + std::to_string(b.dim()));
      continue;
    }
    const double r = std::max(containment_residual(a, b.basis()), containment_residual(b, a.basis()));
    out.record(r, m, tol, "computed subspace differs from the reference");
  }
  return out;
}

CheckOutcome lagrangian_check(const DiracStructure& d, const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  for (const Point& x : points) {
    const LagrangianDefect l = lagrangian_defect(d, x);
    if (l.rank != d.dim()) {
      out.fail(x, "rank " + std::to_string(l.rank) + " instead of " + std::to_string(d.dim()));
      continue;
    }
    out.record(l.max_pairing, x, tol, "spanning sections not isotropic");
  }
  return out;
}

CheckOutcome characteristic_check(const DiracStructure& d, const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  for (const Point& x : points) {
    const CharacteristicSpaces c = characteristic_spaces(d, x);
    out.record(c.identity_residual, x, tol, "G0 = P1° or P0 = G1° fails");
    if (!c.identities_hold) out.fail(x, "characteristic identities fail");
  }
  return out;
}

CheckOutcome energy_check(const DiracStructure& d, const ScalarField& h, const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  for (const Point& m : points) {
    const HamiltonianSolution s = solve_implicit_hamiltonian(d, h, m, tol);
    if (!s.admissible) {
      out.fail(m, "dH not admissible");
      continue;
    }
    const double scale = std::max(1.0, h.jet(m).grad().norm() * s.X.norm());
    out.record(s.energy_residual / scale, m, tol, "dH(X_H) does not vanish");
  }
  return out;
}

std::vector<Field> parse_elements(const ChartPtr& chart, const SpanSpec& s, const ParamMap& p) {
  std::vector<Field> out;
  for (const auto& row : s.elements) {
    if (static_cast<int>(row.size()) != chart->dim())
      throw DimensionError("span element needs " + std::to_string(chart->dim()) + " components");
    out.push_back(expression_field(chart, parse_all(chart, row, p)));
  }
  return out;
}

// Points of the unreduced chart, its quotient and the leaf charts use disjoint seed streams.
std::uint64_t stream(std::uint64_t seed, std::uint64_t k) { return seed * 0x9E3779B97F4A7C15ULL + k; }

struct ActionContext {
  const CatalogEntry& entry;
  const ActionEntry& ae;
  const AnalysisOptions& opt;
  const std::vector<Point>& m_points;
  bool d_closed;
};

void analyze_action(AnalysisReport& report, const ActionContext& ctx, std::uint64_t index) {
  const CatalogEntry& entry = ctx.entry;
  const ActionEntry& ae = ctx.ae;
  const NonholonomicModel& model = entry.model;
  const DiracStructure& D = model.dirac;
  const SymmetryAction& a = ae.action();
  const LiftedAction& l = ae.lifted;
  const QuotientChart& q = ae.quotient;
  const ChartPtr& M = model.phase.m_chart;
  const ChartPtr& red = q.reduced;
  const ParamMap& P = entry.spec.params;
  const ExpectedSpec& e = ae.spec.expected;
  const double tol = ctx.opt.tol;
  const auto& mp = ctx.m_points;
  const std::vector<Point> rp = sample_points(*red, ctx.opt.samples, stream(ctx.opt.seed, 10 * index + 2));
  Recorder rec(report, ae.spec.name);
  ojson obj = ojson::object();

  // Invariance
  if (ae.is_lift()) {
    rec.guard("action.lift_tangency", M, [&] { return lift_tangency(model.phase, l, mp, tol); });
    rec.guard("action.momentum_map", M, [&] { return momentum_map_residual(model, l, mp, loose(tol)); });
  } else {
    rec.skip("action.lift_tangency", "action given directly on M");
    rec.skip("action.momentum_map", "momentum map needs a cotangent-lifted action");
  }
  rec.guard("action.structure_constants", M, [&] { return check_structure_constants(a, mp, loose(tol)); });
  rec.guard("action.dirac_invariance", M, [&] { return check_dirac_invariance(D, a, mp, loose(tol)); });
  rec.guard("action.quotient_chart", red, [&] { return validate_quotient(a, q, rp, mp, loose(tol)); });

  // Reduction
  const int rank = d_cap_k_perp_rank(D, a, mp, tol);
  obj["d_cap_k_perp_rank"] = rank;
  rec.info("reduction.d_cap_k_perp_rank", "constant rank " + std::to_string(rank), rank);
  const DiracStructure d_red = reduce_dirac(D, a, q, tol);
  rec.guard("reduction.d_red_lagrangian", red, [&] { return lagrangian_check(d_red, rp, tol); });
  rec.guard("reduction.d_red_characteristic", red, [&] { return characteristic_check(d_red, rp, tol); });
  rec.guard("reduction.right_inverse_independence", red, [&] {
    CheckOutcome o;
    const double dev = right_inverse_deviation(D, a, q, rp, ctx.opt.seed, tol);
    o.record(dev, rp.front(), loose(tol), "reduced covectors depend on the right inverse");
    if (!o.ok) o.witness.reset();
    return o;
  });
  rec.guard("reduction.method_b", red, [&] { return verify_method_b(D, a, q, d_red, rp, loose(tol)); });
  rec.guard("reduction.g0_pushdown", red, [&] { return g0_pushdown(D, q, d_red, rp, loose(tol)); });
  if (ctx.d_closed) {
    rec.guard("reduction.closedness_preserved", red, [&] {
      const ClosednessResult c = is_closed(d_red, rp, loose(tol));
      CheckOutcome o;
      o.max_residual = c.max_residual;
      if (!c.closed) o.fail(c.witness->point, "D closed but D_red not closed");
      return o;
    });
  } else {
    rec.skip("reduction.closedness_preserved", "input structure is not closed");
  }

  {
    ojson samples = ojson::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(3, rp.size()); ++i) {
      const Eigen::MatrixXd f = d_red.fiber_matrix(rp[i]);
      ojson cols = ojson::array();
      for (Eigen::Index c = 0; c < f.cols(); ++c) {
        std::vector<double> v(f.col(c).data(), f.col(c).data() + f.rows());
        cols.push_back(v);
      }
      samples.push_back({{"point", point_json(rp[i], red->coords())}, {"sections", cols}});
    }
    obj["d_red_samples"] = samples;
  }

  // Nonholonomic battery
  const int hv = horizontal_plus_vertical_rank(model, l, mp, tol);
  obj["h_plus_v_rank"] = hv;
  obj["v_cap_h_dim"] = vertical_cap_horizontal(model, l, mp.front(), tol).dim();
  obj["reaction_dim"] = reaction_R(model, l, mp.front(), tol).dim();
  obj["d_g_dim"] = optimal_distribution_DG(model, l, mp.front(), tol).dim();
  rec.guard("nonholonomic.flat_U_plus_R", M, [&] { return check_flat_U_plus_R(model, l, mp, loose(tol)); });
  if (hv == M->dim()) {
    rec.guard("nonholonomic.completion_uniqueness", M,
              [&] { return completion_uniqueness(model, l, mp, ctx.opt.seed, loose(tol)); });
  } else {
    rec.skip("nonholonomic.completion_uniqueness", "H + V is not all of TM");
  }
  rec.guard("nonholonomic.omega_hbar", red, [&] { return check_omega_h_bar(model, l, q, d_red, rp, loose(tol)); });

  {
    const CheckOutcome inv = is_involutive_DG(model, l, mp, loose(tol));
    if (e.dg_involutive) {
      rec.outcome("nonholonomic.dg_involutive", inv, M, !*e.dg_involutive);
    } else {
      CheckRecord& c = rec.add("nonholonomic.dg_involutive", CheckStatus::Info, inv.max_residual,
                               inv.ok ? "involutive" : "not involutive");
      if (inv.witness) {
        c.witness = inv.witness;
        c.witness_coords = M->coords();
      }
    }
  }
  for (std::size_t i = 0; i < e.conserved.size(); ++i) {
    rec.guard("nonholonomic.conserved[" + e.conserved[i] + "]", M, [&] {
      return annihilates_DG(model, l, ScalarField::parse(M, e.conserved[i], P), mp, loose(tol));
    });
  }
  for (std::size_t i = 0; i < e.noether.size(); ++i) {
    const std::string tag = "nonholonomic.noether[" + std::to_string(i) + "]";
    if (!ae.is_lift()) {
      rec.skip(tag, "Noether sections need a cotangent-lifted action");
      continue;
    }
    std::vector<ScalarField> f;
    for (const auto& s : e.noether[i].f) f.push_back(ScalarField::parse(M, s, P));
    if (static_cast<int>(f.size()) != a.size()) throw DimensionError(tag + ": one coefficient per generator");
    rec.guard(tag + ".in_D", M, [&] { return noether_pair_in_D(model, l, f, mp, loose(tol)); });
    rec.guard(tag + ".residual", M, [&] {
      CheckOutcome o;
      for (const Point& m : mp)
        o.record(std::abs(noether_residual(model, l, model.hamiltonian, f, m, tol)), m, loose(tol),
                 "Noether equation violated");
      return o;
    });
    if (!e.noether[i].alpha.empty()) {
      const OneForm alpha = OneForm::parse(M, e.noether[i].alpha, P);
      rec.guard(tag + ".form", M, [&] {
        CheckOutcome o;
        for (const Point& m : mp) {
          const Eigen::VectorXd want = alpha.values(m);
          o.record((noether_one_form(model.phase, l, f, m) - want).norm() / std::max(1.0, want.norm()), m, tol,
                   "Noether 1-form differs from the reference");
        }
        return o;
      });
    }
  }
  for (const auto& c : e.criteria) {
    const std::string tag = "nonholonomic.criterion[" + format_coeffs(c.xi) + "]";
    if (!ae.is_lift()) {
      rec.skip(tag, "momentum components need a cotangent-lifted action");
      continue;
    }
    rec.guard(tag, M, [&] {
      const ConservedVerdict v = conserved_criterion(model, l, c.xi, model.hamiltonian, mp, tol);
      CheckOutcome o;
      o.max_residual = v.annihilation.max_residual;
      if (v.criterion != c.conserved) {
        o.fail(v.annihilation.witness ? *v.annihilation.witness : mp.front(),
               std::string("criterion is ") + (v.criterion ? "true" : "false") + ", reference says " +
                   (c.conserved ? "true" : "false"));
      } else if (v.criterion && !v.noether.ok) {
        o.fail(*v.noether.witness, "criterion holds but the momentum is not conserved");
      }
      return o;
    });
  }

  // Leaf reduction
  if (ae.leaf) {
    const Leaf& leaf = *ae.leaf;
    const ChartPtr& N = leaf.level.chart;
    const ChartPtr& lred = leaf.quotient.reduced;
    const std::vector<Point> np = sample_points(*N, ctx.opt.samples, stream(ctx.opt.seed, 10 * index + 3));
    const std::vector<Point> lp = sample_points(*lred, ctx.opt.samples, stream(ctx.opt.seed, 10 * index + 4));
    const int r = restriction_rank(D, leaf.level, np, tol);
    rec.info("leaf.restriction_rank", "dim(G1 ∩ TN) = " + std::to_string(r), r);
    const DiracStructure d_rho = leaf_reduce(D, leaf, tol);
    rec.guard("leaf.d_rho_lagrangian", lred, [&] { return lagrangian_check(d_rho, lp, tol); });
    rec.guard("leaf.form_agreement", lred, [&] { return leaf_form_agreement(D, a, leaf, d_rho, lp, loose(tol)); });
    std::vector<ScalarField> hk;
    for (const auto& c : lred->coords()) {
      const int i = red->index_of(c);
      if (i >= 0) hk.push_back(ScalarField::parse(M, ae.spec.quotient.projection[static_cast<std::size_t>(i)], P));
    }
    if (hk.size() >= 2) {
      rec.guard("leaf.bracket_identity", lred,
                [&] { return reduced_bracket_identity(D, leaf, d_rho, hk[0], hk[1], lp, loose(tol)); });
    } else {
      rec.skip("leaf.bracket_identity", "fewer than two invariant coordinates shared with the leaf quotient");
    }
    if (e.leaf_d_red) {
      const DiracStructure want = structure_from_spec(*e.leaf_d_red, lred, P);
      rec.guard("expected.leaf_d_red_span", lred, [&] { return compare_fibers(d_rho, want, lp, tol); });
    }
  }

  // Reference data
  if (e.d_red) {
    const DiracStructure want = structure_from_spec(*e.d_red, red, P);
    rec.guard("expected.d_red_span", red, [&] { return compare_fibers(d_red, want, rp, tol); });
  }
  for (const auto& b : e.brackets) {
    rec.guard("expected.bracket[" + b.f + "," + b.g + "]", red, [&] {
      const ScalarField f = ScalarField::parse(red, b.f, P);
      const ScalarField g = ScalarField::parse(red, b.g, P);
      const ScalarField v = ScalarField::parse(red, b.value, P);
      CheckOutcome o;
      for (const Point& x : rp) {
        const BracketValue bv = dirac_poisson_bracket(d_red, f, g, x, tol);
        if (!bv.admissible) {
          o.fail(x, "arguments not admissible");
          continue;
        }
        o.record(relative_error(bv.value, v(x)), x, tol,
                 "bracket " + std::to_string(bv.value) + " against reference " + std::to_string(v(x)));
      }
      return o;
    });
  }
  for (std::size_t i = 0; i < e.omega_hbar.size(); ++i) {
    const auto& w = e.omega_hbar[i];
    rec.guard("expected.omega_hbar[" + std::to_string(i) + "]", red, [&] {
      const VectorField X = VectorField::parse(red, w.x, P);
      const VectorField Y = VectorField::parse(red, w.y, P);
      const ScalarField v = ScalarField::parse(red, w.value, P);
      CheckOutcome o;
      for (const Point& x : rp) {
        const double got = omega_h_bar(model, l, q, x, X.values(x), Y.values(x), tol);
        o.record(relative_error(got, v(x)), x, tol,
                 "omega_Hbar " + std::to_string(got) + " against reference " + std::to_string(v(x)));
      }
      return o;
    });
  }
  auto span_check = [&](const std::string& name, const std::optional<SpanSpec>& s,
                        const std::function<Subspace(const Point&)>& got) {
    if (!s) return;
    rec.guard(name, M, [&] {
      const std::vector<Field> el = parse_elements(M, *s, P);
      return compare_subspaces(got, [&](const Point& m) { return span_from_spec(*s, model, el, m, tol); }, mp, tol);
    });
  };
  span_check("expected.U", e.U, [&](const Point& m) { return horizontal_annihilator_U(model, l, m, tol); });
  span_check("expected.reaction_R", e.reaction_R, [&](const Point& m) { return reaction_R(model, l, m, tol); });
  span_check("expected.D_G", e.D_G, [&](const Point& m) { return optimal_distribution_DG(model, l, m, tol); });
  if (e.det_omega_red) {
    rec.guard("expected.det_omega_red", red, [&] {
      const ScalarField v = ScalarField::parse(red, *e.det_omega_red, P);
      CheckOutcome o;
      for (const Point& x : rp) o.record(relative_error(induced_two_form(d_red, x).determinant(), v(x)), x, loose(tol));
      return o;
    });
  }
  if (!e.d_omega_red.empty()) {
    const TwoForm w = induced_two_form_field(d_red);
    for (std::size_t i = 0; i < e.d_omega_red.size(); ++i) {
      const auto& t = e.d_omega_red[i];
      rec.guard("expected.d_omega_red[" + std::to_string(i) + "]", red, [&] {
        const VectorField X = VectorField::parse(red, t.x, P);
        const VectorField Y = VectorField::parse(red, t.y, P);
        const VectorField Z = VectorField::parse(red, t.z, P);
        const ScalarField v = ScalarField::parse(red, t.value, P);
        CheckOutcome o;
        for (const Point& x : rp) {
          const double got = d_two_form_contract(w, X, Y, Z, x);
          o.record(relative_error(got, v(x)), x, loose(tol),
                   "d omega_red " + std::to_string(got) + " against reference " + std::to_string(v(x)));
        }
        return o;
      });
    }
  }
  if (e.d_red_closed) {
    rec.guard(
        "expected.d_red_closed", red,
        [&] {
          const ClosednessResult c = is_closed(d_red, rp, loose(tol));
          CheckOutcome o;
          o.max_residual = c.max_residual;
          if (!c.closed)
            o.fail(c.witness->point, "sections " + std::to_string(c.witness->first + 1) + " and " +
                                         std::to_string(c.witness->second + 1) + " bracket out of D_red");
          return o;
        },
        !*e.d_red_closed);
  }
  report.objects["actions"][ae.spec.name] = obj;
}

}  // namespace

AnalysisReport run_analysis(const CatalogEntry& entry, const std::vector<std::string>& actions,
                            const AnalysisOptions& options) {
  if (options.samples < 1) throw InputError("sample count must be positive");
  if (!(options.tol > 0.0)) throw InputError("tolerance must be positive");
  AnalysisReport report;
  report.system = entry.spec.name;
  report.params = entry.spec.params;
  report.options = options;
  std::vector<const ActionEntry*> chosen;
  if (actions.empty()) {
    for (const auto& a : entry.actions) chosen.push_back(&a);
  } else {
    for (const auto& n : actions) chosen.push_back(&entry.action(n));
  }
  for (const auto* a : chosen) report.actions.push_back(a->spec.name);

  const NonholonomicModel& model = entry.model;
  const ChartPtr& M = model.phase.m_chart;
  const ChartPtr& Q = model.system.q_chart;
  const double tol = options.tol;
  const std::vector<Point> qp = sample_points(*Q, options.samples, stream(options.seed, 0));
  const std::vector<Point> mp = sample_points(*M, options.samples, stream(options.seed, 1));
  Recorder rec(report, "system");

  rec.guard("system.metric_and_constraints", Q, [&] { return check_system(model.system, qp, tol); });
  rec.guard("system.constraint_defect", M, [&] {
    CheckOutcome o;
    for (const Point& m : mp) o.record(constraint_defect(model.system, model.phase, m), m, tol);
    return o;
  });
  if (entry.stated_hamiltonian) {
    rec.guard("system.hamiltonian_matches_stated", M, [&] {
      CheckOutcome o;
      for (const Point& m : mp)
        o.record(relative_error(model.hamiltonian(m), (*entry.stated_hamiltonian)(m)), m, tol,
                 "energy differs from the stated Hamiltonian");
      return o;
    });
  }
  rec.guard("dirac.lagrangian", M, [&] { return lagrangian_check(model.dirac, mp, tol); });
  rec.guard("dirac.characteristic", M, [&] { return characteristic_check(model.dirac, mp, tol); });
  rec.guard("dirac.energy_conservation", M, [&] { return energy_check(model.dirac, model.hamiltonian, mp, tol); });
  const ClosednessResult closed = is_closed(model.dirac, mp, loose(tol));
  rec.info("dirac.closed", closed.closed ? "closed" : "not closed", closed.max_residual);
  report.objects["system"] = {{"q_dim", Q->dim()},
                              {"m_dim", M->dim()},
                              {"m_coords", M->coords()},
                              {"eliminated", model.phase.eliminated},
                              {"closed", closed.closed}};
  for (const auto& b : entry.spec.expected.brackets) {
    rec.guard("expected.bracket[" + b.f + "," + b.g + "]", M, [&] {
      const ScalarField f = ScalarField::parse(M, b.f, entry.spec.params);
      const ScalarField g = ScalarField::parse(M, b.g, entry.spec.params);
      const ScalarField v = ScalarField::parse(M, b.value, entry.spec.params);
      CheckOutcome o;
      for (const Point& m : mp) {
        const BracketValue bv = dirac_poisson_bracket(model.dirac, f, g, m, tol);
        if (!bv.admissible) {
          o.fail(m, "arguments not admissible");
          continue;
        }
        o.record(relative_error(bv.value, v(m)), m, tol);
      }
      return o;
    });
  }

  report.objects["actions"] = ojson::object();
  std::uint64_t index = 1;
  for (const auto* a : chosen) analyze_action(report, {entry, *a, options, mp, closed.closed}, index++);
  return report;
}

ojson to_json(const AnalysisReport& r) {
  ojson j;
  j["schema"] = "dirac-kit/1";
  j["system"] = r.system;
  j["actions"] = r.actions;
  ojson params = ojson::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["seed"] = r.options.seed;
  j["samples"] = r.options.samples;
  j["tol"] = r.options.tol;
  int counts[5] = {0, 0, 0, 0, 0};
  ojson checks = ojson::array();
  for (const auto& c : r.checks) {
    ++counts[static_cast<int>(c.status)];
    ojson cj = {{"name", c.name}, {"status", status_name(c.status)}, {"max_residual", c.max_residual}};
    cj["witness"] = c.witness ? point_json(*c.witness, c.witness_coords) : ojson(nullptr);
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(cj);
  }
  j["summary"] = {{"pass", counts[0]}, {"fail", counts[1]}, {"skipped", counts[2]}, {"expected-fail", counts[3]},
                  {"info", counts[4]}};
  j["checks"] = checks;
  j["objects"] = r.objects;
  return j;
}

std::string report_text(const AnalysisReport& r) { return to_json(r).dump(2) + "\n"; }

}  // namespace dk
