#include "dirackit/config.hpp"

#include "dirackit/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dk {

using nlohmann::json;

bool ExpectedSpec::empty() const {
  return !d_red && brackets.empty() && omega_hbar.empty() && !reaction_R && !U && !D_G && !dg_involutive &&
         conserved.empty() && criteria.empty() && noether.empty() && !det_omega_red && d_omega_red.empty() &&
         !d_red_closed && !leaf_d_red;
}

const ActionSpec& SystemSpec::action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return a;
  std::string known;
  for (const auto& a : actions) known += (known.empty() ? "" : ", ") + a.name;
  throw InputError("system '" + name + "' has no action '" + n + "' (known: " + known + ")");
}

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

void check_quotient(const QuotientSpec& q, std::size_t source_dim, const std::string& where) {
  require(!q.coords.empty(), where + ": quotient needs coordinates");
  require(q.projection.size() == q.coords.size(), where + ": projection needs one entry per reduced coordinate");
  require(q.slice.size() == source_dim, where + ": slice needs one entry per source coordinate");
  require(q.box.empty() || q.box.size() == q.coords.size(), where + ": quotient box size mismatch");
}

void check_generators(const ExprMatrix& g, const std::vector<double>& sc, std::size_t dim, const std::string& where) {
  require(!g.empty(), where + ": at least one generator is required");
  for (const auto& v : g) require(v.size() == dim, where + ": generator has the wrong number of components");
  const std::size_t k = g.size();
  require(sc.empty() || sc.size() == k * k * k, where + ": structure_constants needs k^3 entries");
}

}  // namespace

void validate_spec(const SystemSpec& s) {
  const std::size_t d = s.chart.size();
  require(d > 0, "system needs at least one configuration coordinate");
  require(s.box.empty() || s.box.size() == d, "box needs one interval per coordinate");
  require(s.metric.size() == d, "metric must be " + std::to_string(d) + " x " + std::to_string(d));
  for (const auto& row : s.metric) require(row.size() == d, "metric rows must have " + std::to_string(d) + " entries");
  for (const auto& row : s.constraints) require(row.size() == d, "constraint rows must have one entry per coordinate");
  require(s.constraints.size() < d, "more constraints than coordinates");
  require(s.eliminate.empty() || s.eliminate.size() == s.constraints.size(),
          "eliminate must list one momentum per constraint");
  const std::size_t n = 2 * d - s.constraints.size();
  for (const auto& a : s.actions) {
    const std::string where = "action '" + a.name + "'";
    require(!a.name.empty(), "every action needs a name");
    check_generators(a.generators, a.structure_constants, a.lifted ? d : n, where);
    check_quotient(a.quotient, n, where);
    if (a.leaf) {
      const auto& l = *a.leaf;
      require(!l.coords.empty(), where + ": leaf needs coordinates");
      require(l.embedding.size() == n, where + ": leaf embedding needs one entry per coordinate of M");
      require(l.box.empty() || l.box.size() == l.coords.size(), where + ": leaf box size mismatch");
      check_generators(l.generators, l.structure_constants, l.coords.size(), where + " leaf");
      check_quotient(l.quotient, l.coords.size(), where + " leaf");
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json intervals_to_json(const std::vector<Interval>& box) {
  json j = json::array();
  for (const auto& b : box) j.push_back({b.lo, b.hi});
  return j;
}

json quotient_to_json(const QuotientSpec& q) {
  json j = {{"coords", q.coords}, {"projection", q.projection}, {"slice", q.slice}};
  if (!q.box.empty()) j["box"] = intervals_to_json(q.box);
  return j;
}

json structure_to_json(const StructureSpec& s) {
  json j = {{"kind", s.kind}};
  if (s.kind == "sections") {
    json secs = json::array();
    for (const auto& sec : s.sections) secs.push_back({{"vec", sec.vec}, {"form", sec.form}});
    j["sections"] = secs;
  } else {
    json w = json::array();
    for (const auto& t : s.wedges) w.push_back({t.a, t.b, t.coeff});
    j["wedges"] = w;
  }
  return j;
}

json span_to_json(const SpanSpec& s) {
  json j = {{"kind", s.kind}};
  if (s.kind == "elements" || s.kind == "kernel") j["elements"] = s.elements;
  return j;
}

json expected_to_json(const ExpectedSpec& e) {
  json j = json::object();
  if (e.d_red) j["d_red"] = structure_to_json(*e.d_red);
  if (!e.brackets.empty()) {
    json b = json::array();
    for (const auto& x : e.brackets) b.push_back({{"f", x.f}, {"g", x.g}, {"value", x.value}});
    j["brackets"] = b;
  }
  if (!e.omega_hbar.empty()) {
    json b = json::array();
    for (const auto& x : e.omega_hbar) b.push_back({{"x", x.x}, {"y", x.y}, {"value", x.value}});
    j["omega_hbar"] = b;
  }
  if (e.reaction_R) j["reaction_R"] = span_to_json(*e.reaction_R);
  if (e.U) j["U"] = span_to_json(*e.U);
  if (e.D_G) j["D_G"] = span_to_json(*e.D_G);
  if (e.dg_involutive) j["dg_involutive"] = *e.dg_involutive;
  if (!e.conserved.empty()) j["conserved"] = e.conserved;
  if (!e.criteria.empty()) {
    json b = json::array();
    for (const auto& x : e.criteria) b.push_back({{"xi", x.xi}, {"conserved", x.conserved}});
    j["criteria"] = b;
  }
  if (!e.noether.empty()) {
    json b = json::array();
    for (const auto& x : e.noether) {
      json n = {{"f", x.f}};
      if (!x.alpha.empty()) n["alpha"] = x.alpha;
      b.push_back(n);
    }
    j["noether"] = b;
  }
  if (e.det_omega_red) j["det_omega_red"] = *e.det_omega_red;
  if (!e.d_omega_red.empty()) {
    json b = json::array();
    for (const auto& x : e.d_omega_red) b.push_back({{"x", x.x}, {"y", x.y}, {"z", x.z}, {"value", x.value}});
    j["d_omega_red"] = b;
  }
  if (e.d_red_closed) j["d_red_closed"] = *e.d_red_closed;
  if (e.leaf_d_red) j["leaf_d_red"] = structure_to_json(*e.leaf_d_red);
  return j;
}

json leaf_to_json(const LeafSpec& l) {
  json j = {{"conserved", l.conserved},   {"level", l.level},           {"coords", l.coords},
            {"embedding", l.embedding},   {"generators", l.generators}, {"quotient", quotient_to_json(l.quotient)}};
  if (!l.box.empty()) j["box"] = intervals_to_json(l.box);
  if (!l.structure_constants.empty()) j["structure_constants"] = l.structure_constants;
  return j;
}

}  // namespace

json to_json(const SystemSpec& s) {
  json j;
  j["name"] = s.name;
  j["params"] = json::object();
  for (const auto& [k, v] : s.params) j["params"][k] = v;
  j["chart"] = s.chart;
  if (!s.box.empty()) j["box"] = intervals_to_json(s.box);
  j["metric"] = s.metric;
  j["potential"] = s.potential;
  j["constraints"] = s.constraints;
  if (!s.eliminate.empty()) j["eliminate"] = s.eliminate;
  if (!s.hamiltonian.empty()) j["hamiltonian"] = s.hamiltonian;
  json acts = json::array();
  for (const auto& a : s.actions) {
    json aj = {{"name", a.name}, {"generators", a.generators}, {"quotient", quotient_to_json(a.quotient)}};
    if (!a.lifted) aj["lifted"] = false;
    if (!a.structure_constants.empty()) aj["structure_constants"] = a.structure_constants;
    if (a.leaf) aj["leaf"] = leaf_to_json(*a.leaf);
    if (!a.expected.empty()) aj["expected"] = expected_to_json(a.expected);
    acts.push_back(aj);
  }
  j["actions"] = acts;
  if (!s.expected.empty()) j["expected"] = expected_to_json(s.expected);
  return j;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing key '" + key + "'");
  return j.at(key);
}

template <class T>
T as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

template <class T>
T optional_member(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return as<T>(j.at(key), where + "." + key);
}

std::vector<Interval> intervals_from_json(const json& j, const std::string& where) {
  std::vector<Interval> out;
  for (const auto& b : j) {
    auto v = as<std::vector<double>>(b, where);
    if (v.size() != 2 || !(v[0] < v[1])) throw InputError(where + ": intervals are [lo, hi] with lo < hi");
    out.push_back({v[0], v[1]});
  }
  return out;
}

QuotientSpec quotient_from_json(const json& j, const std::string& where) {
  QuotientSpec q;
  q.coords = as<std::vector<std::string>>(member(j, "coords", where), where + ".coords");
  q.projection = as<ExprList>(member(j, "projection", where), where + ".projection");
  q.slice = as<ExprList>(member(j, "slice", where), where + ".slice");
  if (j.contains("box")) q.box = intervals_from_json(j.at("box"), where + ".box");
  return q;
}

StructureSpec structure_from_json(const json& j, const std::string& where) {
  StructureSpec s;
  s.kind = optional_member<std::string>(j, "kind", "sections", where);
  if (s.kind == "sections") {
    for (const auto& sec : member(j, "sections", where))
      s.sections.push_back({as<ExprList>(member(sec, "vec", where), where + ".vec"),
                            as<ExprList>(member(sec, "form", where), where + ".form")});
  } else if (s.kind == "two_form" || s.kind == "bivector") {
    for (const auto& t : member(j, "wedges", where)) {
      auto v = as<std::vector<std::string>>(t, where + ".wedges");
      if (v.size() != 3) throw InputError(where + ": wedge terms are [a, b, coefficient]");
      s.wedges.push_back({v[0], v[1], v[2]});
    }
  } else {
    throw InputError(where + ": unknown structure kind '" + s.kind + "'");
  }
  return s;
}

SpanSpec span_from_json(const json& j, const std::string& where) {
  SpanSpec s;
  s.kind = optional_member<std::string>(j, "kind", "elements", where);
  static const std::vector<std::string> kinds = {"elements", "kernel", "zero", "full", "horizontal", "annihilator_H"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
    throw InputError(where + ": unknown span kind '" + s.kind + "'");
  if (s.kind == "elements" || s.kind == "kernel") s.elements = as<ExprMatrix>(member(j, "elements", where), where);
  return s;
}

ExpectedSpec expected_from_json(const json& j, const std::string& where) {
  ExpectedSpec e;
  if (!j.is_object()) throw InputError(where + " must be an object");
  if (j.contains("d_red")) e.d_red = structure_from_json(j.at("d_red"), where + ".d_red");
  if (j.contains("brackets"))
    for (const auto& b : j.at("brackets"))
      e.brackets.push_back({as<std::string>(member(b, "f", where), where), as<std::string>(member(b, "g", where), where),
                            as<std::string>(member(b, "value", where), where)});
  if (j.contains("omega_hbar"))
    for (const auto& b : j.at("omega_hbar"))
      e.omega_hbar.push_back({as<ExprList>(member(b, "x", where), where), as<ExprList>(member(b, "y", where), where),
                              as<std::string>(member(b, "value", where), where)});
  if (j.contains("reaction_R")) e.reaction_R = span_from_json(j.at("reaction_R"), where + ".reaction_R");
  if (j.contains("U")) e.U = span_from_json(j.at("U"), where + ".U");
  if (j.contains("D_G")) e.D_G = span_from_json(j.at("D_G"), where + ".D_G");
  if (j.contains("dg_involutive")) e.dg_involutive = as<bool>(j.at("dg_involutive"), where + ".dg_involutive");
  e.conserved = optional_member<ExprList>(j, "conserved", {}, where);
  if (j.contains("criteria"))
    for (const auto& b : j.at("criteria"))
      e.criteria.push_back({as<std::vector<double>>(member(b, "xi", where), where),
                            as<bool>(member(b, "conserved", where), where)});
  if (j.contains("noether"))
    for (const auto& b : j.at("noether"))
      e.noether.push_back({as<ExprList>(member(b, "f", where), where), optional_member<ExprList>(b, "alpha", {}, where)});
  if (j.contains("det_omega_red")) e.det_omega_red = as<std::string>(j.at("det_omega_red"), where);
  if (j.contains("d_omega_red"))
    for (const auto& b : j.at("d_omega_red"))
      e.d_omega_red.push_back({as<ExprList>(member(b, "x", where), where), as<ExprList>(member(b, "y", where), where),
                               as<ExprList>(member(b, "z", where), where),
                               as<std::string>(member(b, "value", where), where)});
  if (j.contains("d_red_closed")) e.d_red_closed = as<bool>(j.at("d_red_closed"), where);
  if (j.contains("leaf_d_red")) e.leaf_d_red = structure_from_json(j.at("leaf_d_red"), where + ".leaf_d_red");
  return e;
}

LeafSpec leaf_from_json(const json& j, const std::string& where) {
  LeafSpec l;
  l.conserved = optional_member<ExprList>(j, "conserved", {}, where);
  l.level = optional_member<double>(j, "level", 1.0, where);
  l.coords = as<std::vector<std::string>>(member(j, "coords", where), where + ".coords");
  l.embedding = as<ExprList>(member(j, "embedding", where), where + ".embedding");
  l.generators = as<ExprMatrix>(member(j, "generators", where), where + ".generators");
  l.structure_constants = optional_member<std::vector<double>>(j, "structure_constants", {}, where);
  l.quotient = quotient_from_json(member(j, "quotient", where), where + ".quotient");
  if (j.contains("box")) l.box = intervals_from_json(j.at("box"), where + ".box");
  return l;
}

}  // namespace

SystemSpec system_from_json(const json& j) {
  if (!j.is_object()) throw InputError("system document must be a JSON object");
  SystemSpec s;
  s.name = optional_member<std::string>(j, "name", "custom", "system");
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = as<double>(v, "params." + k);
  }
  s.chart = as<std::vector<std::string>>(member(j, "chart", "system"), "chart");
  if (j.contains("box")) s.box = intervals_from_json(j.at("box"), "box");
  s.metric = as<ExprMatrix>(member(j, "metric", "system"), "metric");
  s.potential = optional_member<std::string>(j, "potential", "0", "system");
  s.constraints = optional_member<ExprMatrix>(j, "constraints", {}, "system");
  s.eliminate = optional_member<std::vector<std::string>>(j, "eliminate", {}, "system");
  s.hamiltonian = optional_member<std::string>(j, "hamiltonian", "", "system");
  if (j.contains("actions")) {
    int idx = 0;
    for (const auto& aj : j.at("actions")) {
      const std::string where = "actions[" + std::to_string(idx) + "]";
      ActionSpec a;
      a.name = optional_member<std::string>(aj, "name", "action" + std::to_string(idx), where);
      a.generators = as<ExprMatrix>(member(aj, "generators", where), where + ".generators");
      a.lifted = optional_member<bool>(aj, "lifted", true, where);
      a.structure_constants = optional_member<std::vector<double>>(aj, "structure_constants", {}, where);
      a.quotient = quotient_from_json(member(aj, "quotient", where), where + ".quotient");
      if (aj.contains("leaf")) a.leaf = leaf_from_json(aj.at("leaf"), where + ".leaf");
      if (aj.contains("expected")) a.expected = expected_from_json(aj.at("expected"), where + ".expected");
      s.actions.push_back(std::move(a));
      ++idx;
    }
  }
  if (j.contains("leaf")) {
    if (s.actions.empty()) throw InputError("a top-level leaf needs an action");
    if (s.actions.front().leaf) throw InputError("leaf given both at top level and on the first action");
    s.actions.front().leaf = leaf_from_json(j.at("leaf"), "leaf");
  }
  if (j.contains("expected")) s.expected = expected_from_json(j.at("expected"), "expected");
  validate_spec(s);
  return s;
}

SystemSpec load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return system_from_json(j);
}

}  // namespace dk
