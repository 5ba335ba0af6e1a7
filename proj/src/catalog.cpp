#include "dirackit/catalog.hpp"

#include "dirackit/errors.hpp"

#include <algorithm>
#include <numbers>
#include <set>

namespace dk {

const ActionEntry& CatalogEntry::action(const std::string& name) const {
  for (const auto& a : actions)
    if (a.spec.name == name) return a;
  spec.action(name);  // throws with the list of known actions
  throw InputError("unknown action '" + name + "'");
}

std::vector<double> structure_constants(int k, const std::vector<std::tuple<int, int, int, double>>& upper) {
  std::vector<double> c(static_cast<std::size_t>(k * k * k), 0.0);
  for (const auto& [l, i, j, v] : upper) {
    c[static_cast<std::size_t>((l * k + i) * k + j)] = v;
    c[static_cast<std::size_t>((l * k + j) * k + i)] = -v;
  }
  return c;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Interval kLinear{-2.0, 2.0};
const Interval kAngle{0.0, kTwoPi};

ExprMatrix identity(int d) {
  ExprMatrix m(static_cast<std::size_t>(d), ExprList(static_cast<std::size_t>(d), "0"));
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = "1";
  return m;
}

ExprList unit(int n, int i) {
  ExprList v(static_cast<std::size_t>(n), "0");
  v[static_cast<std::size_t>(i)] = "1";
  return v;
}

ExprList zeros(int n) { return ExprList(static_cast<std::size_t>(n), "0"); }

SectionSpec section(ExprList vec, ExprList form) { return {std::move(vec), std::move(form)}; }

SpanSpec span_of(std::string kind, ExprMatrix elements = {}) { return {std::move(kind), std::move(elements)}; }

// SE(2) with xi^1 the rotation: [xi^1, xi^2] = -xi^3, [xi^1, xi^3] = xi^2.
std::vector<double> se2_constants(int k, int rot, int tx, int ty) {
  return structure_constants(k, {{ty, rot, tx, 1.0}, {tx, rot, ty, -1.0}});
}

void check_params(const std::string& name, ParamMap& defaults, const ParamMap& given) {
  for (const auto& [k, v] : given) {
    auto it = defaults.find(k);
    if (it == defaults.end()) {
      std::string known;
      for (const auto& d : defaults) known += (known.empty() ? "" : ", ") + d.first;
      throw InputError("system '" + name + "' has no parameter '" + k + "'" +
                       (known.empty() ? std::string(" (it takes none)") : " (known: " + known + ")"));
    }
    if (!(v > 0.0)) throw InputError("parameter '" + k + "' must be positive, got " + std::to_string(v));
    it->second = v;
  }
}

SystemSpec constrained_particle() {
  SystemSpec s;
  s.name = "constrained_particle";
  s.chart = {"x", "y", "z"};
  s.box = {kLinear, kLinear, kLinear};
  s.metric = identity(3);
  s.constraints = {{"-y", "0", "1"}};
  s.eliminate = {"p_z"};
  s.hamiltonian = "((1+y^2)*p_x^2+p_y^2)/2";

  ActionSpec a;
  a.name = "R2";
  a.generators = {{"1", "0", "0"}, {"0", "0", "1"}};
  a.quotient = {{"y", "p_y", "p_x"}, {}, {"y", "p_y", "p_x"}, {"0", "y", "0", "p_x", "p_y"}};
  auto& e = a.expected;
  e.d_red = StructureSpec{"sections",
                          {section({"0", "1", "0"}, {"-1", "0", "0"}),
                           section({"0", "0", "0"}, {"y*p_x", "0", "1+y^2"}),
                           section({"1+y^2", "0", "-y*p_x"}, {"0", "1+y^2", "0"})},
                          {}};
  e.brackets = {{"y", "p_y", "-1"}, {"y", "p_x", "0"}, {"p_y", "p_x", "y*p_x/(1+y^2)"}};
  e.omega_hbar = {{{"0", "1", "0"}, {"1+y^2", "0", "-y*p_x"}, "-(1+y^2)"}};
  e.reaction_R = span_of("annihilator_H");
  e.U = span_of("elements", {{"0", "1+y^2", "0", "-y*p_x", "0"}, {"1", "0", "y", "0", "0"}, unit(5, 4)});
  e.D_G = span_of("elements", {unit(5, 4), unit(5, 0), unit(5, 2), {"0", "-(1+y^2)", "0", "y*p_x", "0"}});
  e.dg_involutive = true;
  e.conserved = {"sqrt(1+y^2)*p_x"};
  e.criteria = {{{1.0, 0.0}, false}};
  e.noether = {{{"1", "y"}, {"0", "y*p_x", "0", "1+y^2", "0"}}};

  LeafSpec l;
  l.conserved = {"sqrt(1+y^2)*p_x"};
  l.level = 1.0;
  l.coords = {"x", "y", "z", "p_y"};
  l.embedding = {"x", "y", "z", "level/sqrt(1+y^2)", "p_y"};
  l.generators = {unit(4, 0), unit(4, 2)};
  l.quotient = {{"y", "p_y"}, {}, {"y", "p_y"}, {"0", "y", "0", "p_y"}};
  a.leaf = l;
  e.leaf_d_red = StructureSpec{"sections",
                               {section({"0", "1"}, {"-1", "0"}), section({"1+y^2", "0"}, {"0", "1+y^2"})},
                               {}};
  s.actions.push_back(std::move(a));
  return s;
}

SystemSpec vertical_disk(const ParamMap& params) {
  SystemSpec s;
  s.name = "vertical_disk";
  s.params = params;
  s.chart = {"x", "y", "theta", "phi"};
  s.box = {kLinear, kLinear, kAngle, kAngle};
  s.metric = {{"mu", "0", "0", "0"}, {"0", "mu", "0", "0"}, {"0", "0", "I", "0"}, {"0", "0", "0", "J"}};
  s.constraints = {{"1", "0", "-R*cos(phi)", "0"}, {"0", "1", "-R*sin(phi)", "0"}};
  s.eliminate = {"p_x", "p_y"};
  s.hamiltonian = "(1+mu*R^2/I)*p_theta^2/(2*I)+p_phi^2/(2*J)";
  const std::string c = "(1+mu*R^2/I)";
  const ExprList rolling = {"R*cos(phi)", "R*sin(phi)", "1", "0", "0", "0"};
  const ExprList reaction = {"mu*R*p_theta*sin(phi)/I", "-mu*R*p_theta*cos(phi)/I", "0", "0", "0", "0"};
  const ExprList d_p_theta = unit(6, 4);
  const ExprList d_p_phi = unit(6, 5);

  {
    ActionSpec a;
    a.name = "R2";
    a.generators = {{"1", "0", "0", "0"}, {"0", "1", "0", "0"}};
    a.quotient = {{"phi", "theta", "p_phi", "p_theta"}, {}, {"phi", "theta", "p_phi", "p_theta"},
                  {"0", "0", "theta", "phi", "p_theta", "p_phi"}};
    auto& e = a.expected;
    e.d_red = StructureSpec{"two_form", {}, {{"phi", "p_phi", "1"}, {"theta", "p_theta", c}}};
    e.U = span_of("horizontal");
    e.reaction_R = span_of("annihilator_H");
    e.D_G = span_of("full");
    e.dg_involutive = true;
    e.criteria = {{{1.0, 0.0}, false}, {{0.0, 1.0}, false}};
    s.actions.push_back(std::move(a));
  }
  {
    ActionSpec a;
    a.name = "SE2";
    a.generators = {{"-y", "x", "0", "1"}, {"1", "0", "0", "0"}, {"0", "1", "0", "0"}};
    a.structure_constants = se2_constants(3, 0, 1, 2);
    a.quotient = {{"theta", "p_theta", "p_phi"}, {}, {"theta", "p_theta", "p_phi"},
                  {"0", "0", "theta", "0", "p_theta", "p_phi"}};
    auto& e = a.expected;
    e.d_red = StructureSpec{"bivector", {}, {{"p_theta", "theta", "1/" + c}}};
    e.omega_hbar = {{{"1", "0", "0"}, {"0", "1", "0"}, c}};
    e.U = span_of("elements", {unit(6, 3), unit(6, 4), rolling});
    e.reaction_R = span_of("annihilator_H");
    e.D_G = span_of("kernel", {d_p_phi});
    e.dg_involutive = true;
    e.conserved = {"p_phi"};
    ExprList alpha = reaction;
    alpha[5] = "1";
    e.noether = {{{"1", "y", "-x"}, alpha}};

    LeafSpec l;
    l.conserved = {"p_phi"};
    l.coords = {"x", "y", "theta", "phi", "p_theta"};
    l.embedding = {"x", "y", "theta", "phi", "p_theta", "level"};
    l.generators = {{"-y", "x", "0", "1", "0"}, unit(5, 0), unit(5, 1)};
    l.structure_constants = se2_constants(3, 0, 1, 2);
    l.quotient = {{"theta", "p_theta"}, {}, {"theta", "p_theta"}, {"0", "0", "theta", "0", "p_theta"}};
    a.leaf = l;
    e.leaf_d_red = StructureSpec{"sections",
                                 {section({"1", "0"}, {"0", c}), section({"0", "1"}, {"-" + c, "0"})},
                                 {}};
    s.actions.push_back(std::move(a));
  }
  {
    ActionSpec a;
    a.name = "S1xR2";
    a.generators = {{"0", "0", "1", "0"}, {"1", "0", "0", "0"}, {"0", "1", "0", "0"}};
    a.quotient = {{"phi", "p_phi", "p_theta"}, {}, {"phi", "p_phi", "p_theta"},
                  {"0", "0", "0", "phi", "p_theta", "p_phi"}};
    auto& e = a.expected;
    e.d_red = StructureSpec{"sections",
                            {section({"1", "0", "0"}, {"0", "1", "0"}), section({"0", "1", "0"}, {"-1", "0", "0"}),
                             section({"0", "0", "0"}, {"0", "0", "1"})},
                            {}};
    e.omega_hbar = {{{"1", "0", "0"}, {"0", "1", "0"}, "1"}};
    e.U = span_of("elements", {unit(6, 3), rolling, unit(6, 5)});
    e.reaction_R = span_of("elements", {reaction});
    e.D_G = span_of("kernel", {d_p_theta});
    e.dg_involutive = true;
    e.conserved = {"p_theta"};
    e.criteria = {{{1.0, 0.0, 0.0}, true}};
    ExprList alpha = zeros(6);
    alpha[4] = c;
    e.noether = {{{"1", "R*cos(phi)", "R*sin(phi)"}, alpha}};

    LeafSpec l;
    l.conserved = {"p_theta"};
    l.coords = {"x", "y", "theta", "phi", "p_phi"};
    l.embedding = {"x", "y", "theta", "phi", "level", "p_phi"};
    l.generators = {unit(5, 2), unit(5, 0), unit(5, 1)};
    l.quotient = {{"phi", "p_phi"}, {}, {"phi", "p_phi"}, {"0", "0", "0", "phi", "p_phi"}};
    a.leaf = l;
    e.leaf_d_red = StructureSpec{"sections",
                                 {section({"1", "0"}, {"0", "1"}), section({"0", "1"}, {"-1", "0"})},
                                 {}};
    s.actions.push_back(std::move(a));
  }
  {
    ActionSpec a;
    a.name = "SE2xS1";
    a.generators = {{"-y", "x", "0", "1"}, {"1", "0", "0", "0"}, {"0", "1", "0", "0"}, {"0", "0", "1", "0"}};
    a.structure_constants = se2_constants(4, 0, 1, 2);
    a.quotient = {{"p_theta", "p_phi"}, {}, {"p_theta", "p_phi"}, {"0", "0", "0", "0", "p_theta", "p_phi"}};
    auto& e = a.expected;
    e.U = span_of("elements", {unit(6, 3), rolling});
    e.reaction_R = span_of("elements", {reaction});
    e.D_G = span_of("kernel", {d_p_theta, d_p_phi});
    e.dg_involutive = true;
    e.conserved = {"p_theta", "p_phi"};
    e.criteria = {{{0.0, 0.0, 0.0, 1.0}, true}};
    ExprList alpha = reaction;
    alpha[5] = "1";
    ExprList alpha2 = zeros(6);
    alpha2[4] = c;
    e.noether = {{{"1", "y", "-x", "0"}, alpha}, {{"0", "R*cos(phi)", "R*sin(phi)", "1"}, alpha2}};
    s.actions.push_back(std::move(a));
  }
  return s;
}

// The straight-line metric of the skate is degenerate along the constraint
// covector; adding m * phi (x) phi leaves the energy on the constraint
// distribution unchanged and makes the Legendre map invertible.
SystemSpec chaplygin_skate(const ParamMap& params) {
  SystemSpec s;
  s.name = "chaplygin_skate";
  s.params = params;
  s.chart = {"theta", "x", "y"};
  s.box = {kAngle, kLinear, kLinear};
  s.metric = {{"m*s^2", "-m*s*sin(theta)", "m*s*cos(theta)"},
              {"-m*s*sin(theta)", "m+m*sin(theta)^2", "-m*sin(theta)*cos(theta)"},
              {"m*s*cos(theta)", "-m*sin(theta)*cos(theta)", "m+m*cos(theta)^2"}};
  s.constraints = {{"0", "sin(theta)", "-cos(theta)"}};
  s.eliminate = {"p_theta"};
  s.hamiltonian = "(p_x^2+p_y^2)/(2*m)";
  {
    ActionSpec a;
    a.name = "SE2";
    a.generators = {{"1", "-y", "x"}, {"0", "1", "0"}, {"0", "0", "1"}};
    a.structure_constants = se2_constants(3, 0, 1, 2);
    a.quotient = {{"u", "w"},
                  {},
                  {"p_x*cos(theta)+p_y*sin(theta)", "p_y*cos(theta)-p_x*sin(theta)"},
                  {"0", "0", "0", "u", "w"}};
    auto& e = a.expected;
    e.d_red = StructureSpec{"sections", {section({"0", "0"}, {"1", "0"}), section({"0", "0"}, {"0", "1"})}, {}};
    e.reaction_R = span_of("zero");
    e.D_G = span_of("kernel", {unit(5, 3), unit(5, 4)});
    e.dg_involutive = true;
    e.conserved = {"p_x", "p_y"};
    e.criteria = {{{1.0, 0.0, 0.0}, true}, {{0.0, 1.0, 0.0}, true}, {{0.0, 0.0, 1.0}, true}};
    e.noether = {{{"1", "y", "-x"}, {}}, {{"0", "cos(theta)", "sin(theta)"}, {}}};
    s.actions.push_back(std::move(a));
  }
  {
    ActionSpec a;
    a.name = "R2";
    a.generators = {{"0", "1", "0"}, {"0", "0", "1"}};
    a.quotient = {{"theta", "p_x", "p_y"}, {}, {"theta", "p_x", "p_y"}, {"theta", "0", "0", "p_x", "p_y"}};
    auto& e = a.expected;
    const ExprList tilt = {"0", "0", "0", "sin(theta)", "-cos(theta)"};
    e.U = span_of("elements", {tilt, unit(5, 0), {"0", "cos(theta)", "sin(theta)", "0", "0"}});
    e.reaction_R = span_of("annihilator_H");
    e.D_G = span_of("elements", {tilt, unit(5, 0), unit(5, 1), unit(5, 2)});
    e.dg_involutive = false;
    e.criteria = {{{1.0, 0.0}, false}, {{0.0, 1.0}, false}};
    e.noether = {{{"cos(theta)", "sin(theta)"}, {"0", "0", "0", "cos(theta)", "sin(theta)"}}};
    s.actions.push_back(std::move(a));
  }
  return s;
}

SystemSpec skate_with_rotor(const ParamMap& params) {
  SystemSpec s;
  s.name = "skate_with_rotor";
  s.params = params;
  s.chart = {"phi", "theta", "x", "y"};
  s.box = {kAngle, kAngle, kLinear, kLinear};
  s.metric = {{"J", "J", "0", "0"},
              {"J", "J+m*s^2", "-m*s*sin(theta)", "m*s*cos(theta)"},
              {"0", "-m*s*sin(theta)", "m+m*sin(theta)^2", "-m*sin(theta)*cos(theta)"},
              {"0", "m*s*cos(theta)", "-m*sin(theta)*cos(theta)", "m+m*cos(theta)^2"}};
  s.constraints = {{"0", "0", "sin(theta)", "-cos(theta)"}};
  s.eliminate = {"p_theta"};
  s.hamiltonian = "(p_x^2+p_y^2)/(2*m)+p_phi^2/(2*J)";

  ActionSpec a;
  a.name = "S1xSE2";
  a.generators = {{"1", "0", "0", "0"}, {"0", "1", "-y", "x"}, {"0", "0", "1", "0"}, {"0", "0", "0", "1"}};
  a.structure_constants = se2_constants(4, 1, 2, 3);
  a.quotient = {{"p_phi", "u", "w"},
                {},
                {"p_phi", "p_x*cos(theta)+p_y*sin(theta)", "p_y*cos(theta)-p_x*sin(theta)"},
                {"0", "0", "0", "0", "p_phi", "u", "w"}};
  auto& e = a.expected;
  e.d_red = StructureSpec{"sections",
                          {section(zeros(3), unit(3, 0)), section(zeros(3), unit(3, 1)), section(zeros(3), unit(3, 2))},
                          {}};
  e.reaction_R = span_of("zero");
  e.D_G = span_of("kernel", {unit(7, 4), unit(7, 5), unit(7, 6)});
  e.dg_involutive = true;
  e.conserved = {"p_phi", "p_x", "p_y"};
  e.criteria = {{{1.0, 0.0, 0.0, 0.0}, true},
                {{0.0, 1.0, 0.0, 0.0}, true},
                {{0.0, 0.0, 1.0, 0.0}, true},
                {{0.0, 0.0, 0.0, 1.0}, true}};
  e.noether = {{{"1", "0", "0", "0"}, {"0", "0", "0", "0", "1", "0", "0"}},
               {{"0", "1", "y", "-x"}, {}},
               {{"0", "0", "cos(theta)", "sin(theta)"}, {}}};
  s.actions.push_back(std::move(a));
  return s;
}

SystemSpec heisenberg_particle() {
  SystemSpec s;
  s.name = "heisenberg_particle";
  s.chart = {"x", "y", "z"};
  s.box = {kLinear, kLinear, kLinear};
  s.metric = identity(3);
  s.constraints = {{"-y", "x", "1"}};
  s.eliminate = {"p_z"};
  s.hamiltonian = "(p_x^2+p_y^2+(y*p_x-x*p_y)^2)/2";

  ActionSpec a;
  a.name = "Z";
  a.generators = {{"0", "0", "1"}};
  a.quotient = {{"x", "y", "p_x", "p_y"}, {}, {"x", "y", "p_x", "p_y"}, {"x", "y", "0", "p_x", "p_y"}};
  auto& e = a.expected;
  e.d_red = StructureSpec{"two_form",
                          {},
                          {{"x", "p_x", "1+y^2"},
                           {"y", "p_y", "1+x^2"},
                           {"x", "y", "y*p_x-x*p_y"},
                           {"x", "p_y", "-x*y"},
                           {"y", "p_x", "-x*y"}}};
  e.det_omega_red = "(1+x^2+y^2)^2";
  e.d_omega_red = {{unit(4, 0), unit(4, 1), unit(4, 2), "-2*y"}, {unit(4, 0), unit(4, 1), unit(4, 3), "2*x"}};
  e.d_red_closed = false;
  e.reaction_R = span_of("annihilator_H");
  e.D_G = span_of("full");
  e.criteria = {{{1.0}, false}};
  s.actions.push_back(std::move(a));
  return s;
}

std::vector<Interval> box_for(const std::vector<std::string>& coords, const std::vector<Interval>& given,
                              const ChartPtr& source) {
  if (!given.empty()) return given;
  std::vector<Interval> box;
  for (const auto& c : coords) {
    const int i = source->index_of(c);
    box.push_back(i >= 0 ? source->box()[static_cast<std::size_t>(i)] : kLinear);
  }
  return box;
}

QuotientChart build_quotient(const ChartPtr& source, const std::string& name, const QuotientSpec& q,
                             const ParamMap& params) {
  auto reduced = make_chart(name, q.coords, box_for(q.coords, q.box, source));
  return {reduced, PointMap::parse(source, reduced, q.projection, params),
          PointMap::parse(reduced, source, q.slice, params)};
}

std::vector<VectorField> parse_generators(const ChartPtr& chart, const ExprMatrix& g, const ParamMap& params) {
  std::vector<VectorField> out;
  for (const auto& v : g) out.push_back(VectorField::parse(chart, v, params));
  return out;
}

bool is_zero_text(const std::string& s) {
  return s.empty() || s.find_first_not_of(" 0.") == std::string::npos;
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"constrained_particle", "vertical_disk", "chaplygin_skate", "skate_with_rotor", "heisenberg_particle"};
}

SystemSpec catalog_spec(const std::string& name, const ParamMap& params) {
  ParamMap defaults;
  if (name == "vertical_disk") defaults = {{"mu", 1.0}, {"I", 1.0}, {"J", 1.0}, {"R", 1.0}};
  else if (name == "chaplygin_skate") defaults = {{"m", 1.0}, {"s", 1.0}};
  else if (name == "skate_with_rotor") defaults = {{"m", 1.0}, {"s", 1.0}, {"J", 1.0}};
  else if (name != "constrained_particle" && name != "heisenberg_particle") {
    std::string known;
    for (const auto& n : catalog_names()) known += (known.empty() ? "" : ", ") + n;
    throw InputError("unknown system '" + name + "' (known: " + known + ")");
  }
  check_params(name, defaults, params);
  if (name == "constrained_particle") return constrained_particle();
  if (name == "vertical_disk") return vertical_disk(defaults);
  if (name == "chaplygin_skate") return chaplygin_skate(defaults);
  if (name == "skate_with_rotor") return skate_with_rotor(defaults);
  return heisenberg_particle();
}

CatalogEntry build_entry(const SystemSpec& spec) {
  validate_spec(spec);
  const ParamMap& P = spec.params;
  std::vector<Interval> box = spec.box;
  if (box.empty()) box.assign(spec.chart.size(), kLinear);
  auto q = make_chart(spec.name + ".Q", spec.chart, box);

  MechanicalSystem sys;
  sys.name = spec.name;
  sys.q_chart = q;
  ExprList flat;
  for (const auto& row : spec.metric) flat.insert(flat.end(), row.begin(), row.end());
  sys.metric = expression_field(q, parse_all(q, flat, P));
  if (!is_zero_text(spec.potential)) sys.potential = ScalarField::parse(q, spec.potential, P);
  for (const auto& row : spec.constraints) sys.constraints.push_back(OneForm::parse(q, row, P));

  CatalogEntry entry{spec, build_model(sys, spec.eliminate), {}, std::nullopt};
  const ChartPtr& M = entry.model.phase.m_chart;
  if (!spec.hamiltonian.empty()) entry.stated_hamiltonian = ScalarField::parse(M, spec.hamiltonian, P);

  std::set<std::string> seen;
  for (const auto& a : spec.actions) {
    if (!seen.insert(a.name).second) throw InputError("duplicate action name '" + a.name + "'");
    ActionEntry ae;
    ae.spec = a;
    if (a.lifted) {
      ae.lifted = lifted_action(entry.model.phase, a.name, parse_generators(q, a.generators, P), a.structure_constants);
    } else {
      ae.lifted.action = SymmetryAction{a.name, M, parse_generators(M, a.generators, P), a.structure_constants};
    }
    ae.quotient = build_quotient(M, spec.name + "." + a.name + ".red", a.quotient, P);
    if (a.leaf) {
      const LeafSpec& l = *a.leaf;
      ParamMap lp = P;
      lp["level"] = l.level;
      auto n = make_chart(spec.name + "." + a.name + ".leaf", l.coords, box_for(l.coords, l.box, M));
      Leaf leaf;
      leaf.level.chart = n;
      leaf.level.embedding = PointMap::parse(n, M, l.embedding, lp);
      for (const auto& f : l.conserved) leaf.level.functions.push_back(ScalarField::parse(M, f, P));
      leaf.action = SymmetryAction{a.name + ".leaf", n, parse_generators(n, l.generators, lp), l.structure_constants};
      leaf.quotient = build_quotient(n, spec.name + "." + a.name + ".leaf.red", l.quotient, lp);
      ae.leaf = std::move(leaf);
    }
    entry.actions.push_back(std::move(ae));
  }
  return entry;
}

CatalogEntry load(const std::string& name, const ParamMap& params) { return build_entry(catalog_spec(name, params)); }

}  // namespace dk
