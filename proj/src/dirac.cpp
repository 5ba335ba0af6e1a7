#include "dirackit/dirac.hpp"

#include "dirackit/errors.hpp"
#include "dirackit/jet_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dk {

namespace {

std::string format_point(const Point& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  return os.str();
}

JetList zero_jets(int size, int dim, int order = 2) { return JetList(size, Jet(0.0, dim, order)); }

double max_column_norm(const Eigen::MatrixXd& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.cols(); ++i) s = std::max(s, m.col(i).norm());
  return s;
}

Eigen::MatrixXd vector_block(const SectionList& s, int n) {
  Eigen::MatrixXd b(n, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = values(s[i].vec);
  return b;
}

Eigen::MatrixXd form_block(const SectionList& s, int n) {
  Eigen::MatrixXd a(n, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = values(s[i].form);
  return a;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double tol, double scale) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double ref = std::max(s.size() ? s(0) : 0.0, scale);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (ref > 0.0 && s(i) > tol * ref) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

PontryaginSection::PontryaginSection(VectorField X, OneForm alpha)
    : vector_part(std::move(X)), form_part(std::move(alpha)) {
  require_same_chart(vector_part.chart(), form_part.chart(), "PontryaginSection");
}

Eigen::VectorXd stack(const SectionJets& s) {
  Eigen::VectorXd v(s.vec.size() + s.form.size());
  v << values(s.vec), values(s.form);
  return v;
}

double pontryagin_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& alpha, const Eigen::VectorXd& v,
                          const Eigen::VectorXd& beta) {
  if (u.size() != alpha.size() || v.size() != beta.size() || u.size() != v.size()) {
    throw DimensionError("pontryagin_pairing: fiber dimensions differ");
  }
  return beta.dot(u) + alpha.dot(v);
}

Jet pontryagin_pairing(const SectionJets& a, const SectionJets& b) {
  return jets::pair(b.form, a.vec) + jets::pair(a.form, b.vec);
}

SectionJets courant_bracket(const SectionJets& a, const SectionJets& b, bool skew) {
  SectionJets out;
  out.vec = jets::bracket(a.vec, b.vec);
  out.form = jets::lie_derivative(a.vec, b.form);
  const JetList iyda = jets::interior(b.vec, jets::exterior_derivative(a.form));
  for (std::size_t i = 0; i < out.form.size(); ++i) out.form[i] -= iyda[i];
  if (skew) {
    const JetList dp = jets::differential(pontryagin_pairing(a, b));
    for (std::size_t i = 0; i < out.form.size(); ++i) out.form[i] -= 0.5 * dp[i];
  }
  return out;
}

PontryaginSection courant_bracket(const PontryaginSection& a, const PontryaginSection& b, bool skew) {
  require_same_chart(a.chart(), b.chart(), "courant_bracket");
  const ChartPtr chart = a.chart();
  const int n = chart->dim();
  auto both = [a, b, skew](const Point& m) { return courant_bracket(a.eval(m), b.eval(m), skew); };
  VectorField X(Field(chart, n, [both](const Point& m) { return both(m).vec; }));
  OneForm alpha(Field(chart, n, [both](const Point& m) { return both(m).form; }));
  return PontryaginSection(X, alpha);
}

DiracStructure::DiracStructure(ChartPtr chart, FrameFn frame)
    : chart_(std::move(chart)), frame_(std::make_shared<const FrameFn>(std::move(frame))) {
  if (!chart_) throw InputError("Dirac structure without a chart");
}

DiracStructure::DiracStructure(const std::vector<PontryaginSection>& sections) {
  if (sections.empty()) throw InputError("Dirac structure needs spanning sections");
  chart_ = sections.front().chart();
  for (const PontryaginSection& s : sections) require_same_chart(chart_, s.chart(), "DiracStructure");
  if (static_cast<int>(sections.size()) != chart_->dim()) {
    throw DimensionError("Dirac structure on '" + chart_->name() + "' needs " + std::to_string(chart_->dim()) +
                         " spanning sections, got " + std::to_string(sections.size()));
  }
  frame_ = std::make_shared<const FrameFn>([sections](const Point& m) {
    SectionList out;
    out.reserve(sections.size());
    for (const PontryaginSection& s : sections) out.push_back(s.eval(m));
    return out;
  });
}

SectionList DiracStructure::sections(const Point& m) const {
  if (m.size() != dim()) throw DimensionError("point dimension does not match chart '" + chart_->name() + "'");
  SectionList s = (*frame_)(m);
  if (static_cast<int>(s.size()) != dim()) {
    throw RankError("dirac", "frame produced " + std::to_string(s.size()) + " sections at " + format_point(m) +
                                 ", expected " + std::to_string(dim()));
  }
  return s;
}

SectionList DiracStructure::sections_composed(const JetList& inner) const {
  SectionList s = sections(values(inner));
  for (SectionJets& sj : s) {
    for (Jet& j : sj.vec) j = compose(j, inner);
    for (Jet& j : sj.form) j = compose(j, inner);
  }
  return s;
}

Eigen::MatrixXd fiber_matrix(const SectionList& s) {
  if (s.empty()) return Eigen::MatrixXd();
  const Eigen::Index len = static_cast<Eigen::Index>(s.front().vec.size() + s.front().form.size());
  Eigen::MatrixXd m(len, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = stack(s[i]);
  return m;
}

Eigen::MatrixXd DiracStructure::fiber_matrix(const Point& m) const { return dk::fiber_matrix(sections(m)); }

Subspace DiracStructure::fiber(const Point& m) const { return Subspace(2 * dim(), fiber_matrix(m)); }

double membership_residual(const Subspace& fiber, const Eigen::MatrixXd& cols, const Eigen::VectorXd& v) {
  return fiber.residual(v, max_column_norm(cols));
}

double membership_residual(const DiracStructure& d, const Point& m, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd cols = d.fiber_matrix(m);
  return membership_residual(Subspace(2 * d.dim(), cols), cols, v);
}

LagrangianDefect lagrangian_defect(const DiracStructure& d, const Point& m) {
  const int n = d.dim();
  const SectionList s = d.sections(m);
  const Eigen::MatrixXd cols = fiber_matrix(s);
  LagrangianDefect out;
  out.rank = Subspace(2 * n, cols).dim();
  const Eigen::MatrixXd X = cols.topRows(n);
  const Eigen::MatrixXd A = cols.bottomRows(n);
  const Eigen::MatrixXd P = A.transpose() * X + X.transpose() * A;
  const double scale = std::max(max_column_norm(cols), 1e-300);
  out.max_pairing = P.cwiseAbs().maxCoeff() / (scale * scale);
  return out;
}

CharacteristicSpaces characteristic_spaces(const DiracStructure& d, const Point& m) {
  const int n = d.dim();
  const Subspace f = d.fiber(m);
  const double tol = f.tol();
  const Eigen::MatrixXd QX = f.basis().topRows(n);
  const Eigen::MatrixXd QA = f.basis().bottomRows(n);
  CharacteristicSpaces c;
  c.G1 = Subspace(n, QX, tol);
  c.P1 = Subspace(n, QA, tol);
  const Eigen::MatrixXd kA = null_space(QA, tol, 1.0);
  const Eigen::MatrixXd kX = null_space(QX, tol, 1.0);
  c.G0 = kA.cols() ? Subspace(n, QX * kA, tol) : Subspace::zero(n, tol);
  c.P0 = kX.cols() ? Subspace(n, QA * kX, tol) : Subspace::zero(n, tol);
  const Subspace p1a = annihilator(c.P1);
  const Subspace g1a = annihilator(c.G1);
  c.identities_hold = equals(c.G0, p1a) && equals(c.P0, g1a);
  c.identity_residual = std::max({containment_residual(p1a, c.G0.basis()), containment_residual(c.G0, p1a.basis()),
                                  containment_residual(g1a, c.P0.basis()), containment_residual(c.P0, g1a.basis())});
  if (c.G0.dim() != p1a.dim() || c.P0.dim() != g1a.dim()) c.identity_residual = std::max(c.identity_residual, 1.0);
  for (const Eigen::MatrixXd* block : {&QX, &QA}) {
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(*block).singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > tol && s(i) < 100.0 * tol) c.ill_conditioned = true;
    }
  }
  if (c.ill_conditioned) c.warning = "singular value within 100x of the rank cutoff at " + format_point(m);
  return c;
}

DiracStructure graph_of_two_form(const ChartPtr& chart, const std::vector<OneForm>& P, const TwoForm& omega) {
  for (const OneForm& p : P) require_same_chart(chart, p.chart(), "graph_of_two_form");
  require_same_chart(chart, omega.chart(), "graph_of_two_form");
  const int n = chart->dim();
  const int r = static_cast<int>(P.size());
  const double tol = default_tolerance();
  return DiracStructure(chart, [P, omega, n, r, tol](const Point& m) {
    JetMatrix pm(r, n, n);
    std::vector<JetList> forms;
    for (int j = 0; j < r; ++j) {
      forms.push_back(P[j].eval(m));
      for (int i = 0; i < n; ++i) pm(j, i) = forms.back()[i];
    }
    if (r > 0 && numeric_rank(pm.values(), tol) != r) {
      throw RankError("graph_of_two_form", "codistribution rank drops below " + std::to_string(r) + " at " +
                                               format_point(m));
    }
    const JetMatrix K = r > 0 ? kernel_frame(pm, tol) : JetMatrix();
    const JetList w = omega.eval(m);
    SectionList out;
    for (int a = 0; a < n - r; ++a) {
      JetList X = r > 0 ? K.column(a) : zero_jets(n, n);
      if (r == 0) X[a] = Jet::constant(1.0, n);
      out.push_back({X, jets::interior(X, w)});
    }
    for (int j = 0; j < r; ++j) out.push_back({zero_jets(n, n), forms[j]});
    return out;
  });
}

DiracStructure graph_of_bivector(const ChartPtr& chart, const std::vector<VectorField>& G, const Bivector& pi) {
  for (const VectorField& g : G) require_same_chart(chart, g.chart(), "graph_of_bivector");
  require_same_chart(chart, pi.chart(), "graph_of_bivector");
  const int n = chart->dim();
  const int r = static_cast<int>(G.size());
  const double tol = default_tolerance();
  return DiracStructure(chart, [G, pi, n, r, tol](const Point& m) {
    JetMatrix gm(r, n, n);
    std::vector<JetList> fields;
    for (int j = 0; j < r; ++j) {
      fields.push_back(G[j].eval(m));
      for (int i = 0; i < n; ++i) gm(j, i) = fields.back()[i];
    }
    if (r > 0 && numeric_rank(gm.values(), tol) != r) {
      throw RankError("graph_of_bivector", "distribution rank drops below " + std::to_string(r) + " at " +
                                               format_point(m));
    }
    const JetMatrix K = r > 0 ? kernel_frame(gm, tol) : JetMatrix();
    const JetList p = pi.eval(m);
    SectionList out;
    for (int a = 0; a < n - r; ++a) {
      JetList alpha = r > 0 ? K.column(a) : zero_jets(n, n);
      if (r == 0) alpha[a] = Jet::constant(1.0, n);
      JetList X(n, Jet::constant(0.0, n));
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) X[j] += alpha[i] * p[i * n + j];
      }
      out.push_back({X, alpha});
    }
    for (int j = 0; j < r; ++j) out.push_back({fields[j], zero_jets(n, n)});
    return out;
  });
}

Eigen::MatrixXd induced_two_form(const DiracStructure& d, const Point& m) {
  const int n = d.dim();
  const SectionList s = d.sections(m);
  const Eigen::MatrixXd B = vector_block(s, n);
  const Eigen::MatrixXd A = form_block(s, n);
  if (numeric_rank(B, default_tolerance()) != n) {
    throw RankError("induced_two_form", "vector parts do not span TM at " + format_point(m));
  }
  return B.transpose().fullPivLu().solve(A.transpose());
}

TwoForm induced_two_form_field(const DiracStructure& d) {
  const int n = d.dim();
  return TwoForm(Field(d.chart(), n * n, [d, n](const Point& m) {
    const SectionList s = d.sections(m);
    JetMatrix Bt(n, n, n);
    JetMatrix At(n, n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Bt(i, j) = s[i].vec[j];
        At(i, j) = s[i].form[j];
      }
    }
    if (numeric_rank(Bt.values(), default_tolerance()) != n) {
      throw RankError("induced_two_form", "vector parts do not span TM at " + format_point(m));
    }
    return solve(Bt, At).a;
  }));
}

Eigen::MatrixXd induced_bivector(const DiracStructure& d, const Point& m) {
  const int n = d.dim();
  const SectionList s = d.sections(m);
  const Eigen::MatrixXd B = vector_block(s, n);
  const Eigen::MatrixXd A = form_block(s, n);
  if (numeric_rank(A, default_tolerance()) != n) {
    throw RankError("induced_bivector", "form parts do not span T*M at " + format_point(m));
  }
  return A.transpose().fullPivLu().solve(B.transpose());
}

ClosednessResult is_closed(const DiracStructure& d, const std::vector<Point>& points, double tol) {
  ClosednessResult out;
  const int n = d.dim();
  for (const Point& m : points) {
    const SectionList s = d.sections(m);
    const Eigen::MatrixXd cols = fiber_matrix(s);
    const Subspace f(2 * n, cols, tol);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double r = membership_residual(f, cols, stack(courant_bracket(s[i], s[j], false)));
        if (r > out.max_residual) out.max_residual = r;
        if (r > tol && !out.witness) out.witness = ClosednessWitness{i, j, m, r};
      }
    }
  }
  out.closed = !out.witness.has_value();
  return out;
}

ClosednessResult is_closed(const DiracStructure& d, int samples, std::uint64_t seed, double tol) {
  return is_closed(d, sample_points(*d.chart(), samples, seed), tol);
}

HamiltonianSolution solve_implicit_hamiltonian(const DiracStructure& d, const Eigen::VectorXd& dH, const Point& m,
                                               double tol) {
  const int n = d.dim();
  if (dH.size() != n) throw DimensionError("solve_implicit_hamiltonian: differential has wrong length");
  const SectionList s = d.sections(m);
  const Eigen::MatrixXd B = vector_block(s, n);
  const Eigen::MatrixXd A = form_block(s, n);
  const double scale = max_column_norm(A);
  const Eigen::VectorXd c0 = pseudo_inverse(A, tol, 0.0) * dH;
  HamiltonianSolution out;
  const double ref = std::max(dH.norm(), scale);
  out.admissibility_residual = ref > 0.0 ? (A * c0 - dH).norm() / ref : 0.0;
  out.admissible = out.admissibility_residual <= tol;
  const Eigen::MatrixXd K = null_space(A, tol, 0.0);
  const Subspace g0 = K.cols() ? Subspace(n, B * K, tol) : Subspace::zero(n, tol);
  out.coset_dim = g0.dim();
  const Eigen::VectorXd x0 = B * c0;
  out.X = x0 - g0.project(x0);
  out.energy_residual = std::abs(dH.dot(out.X));
  return out;
}

HamiltonianSolution solve_implicit_hamiltonian(const DiracStructure& d, const ScalarField& H, const Point& m,
                                               double tol) {
  require_same_chart(d.chart(), H.chart(), "solve_implicit_hamiltonian");
  const Jet h = H.jet(m);
  Eigen::VectorXd dH(d.dim());
  for (int i = 0; i < d.dim(); ++i) dH(i) = h.d(i);
  return solve_implicit_hamiltonian(d, dH, m, tol);
}

BracketValue dirac_poisson_bracket(const DiracStructure& d, const ScalarField& f, const ScalarField& g,
                                   const Point& m, double tol) {
  require_same_chart(d.chart(), f.chart(), "dirac_poisson_bracket");
  require_same_chart(d.chart(), g.chart(), "dirac_poisson_bracket");
  const Jet fj = f.jet(m);
  const Jet gj = g.jet(m);
  Eigen::VectorXd df(d.dim()), dg(d.dim());
  for (int i = 0; i < d.dim(); ++i) {
    df(i) = fj.d(i);
    dg(i) = gj.d(i);
  }
  const HamiltonianSolution xf = solve_implicit_hamiltonian(d, df, m, tol);
  const HamiltonianSolution xg = solve_implicit_hamiltonian(d, dg, m, tol);
  BracketValue out;
  out.admissible = xf.admissible && xg.admissible;
  if (!out.admissible) {
    out.value = out.alternate = std::nan("");
    return out;
  }
  out.value = df.dot(xg.X);
  out.alternate = -dg.dot(xf.X);
  return out;
}

namespace {

// Kernel frame of [X_1 .. X_n | -E] and the induced sections on N.
SectionList restricted_sections(const DiracStructure& d, const LevelSet& ls, const Point& x, double tol) {
  const int dm = d.dim();
  const int dn = ls.chart->dim();
  const JetList inner = ls.embedding.eval(x);
  const SectionList s = d.sections_composed(inner);
  JetMatrix E(dm, dn, dn);
  for (int j = 0; j < dm; ++j) {
    for (int b = 0; b < dn; ++b) E(j, b) = derivative(inner[j], b);
  }
  JetMatrix M(dm, dm + dn, dn);
  for (int j = 0; j < dm; ++j) {
    for (int a = 0; a < dm; ++a) M(j, a) = s[a].vec[j];
    for (int b = 0; b < dn; ++b) M(j, dm + b) = -E(j, b);
  }
  const JetMatrix K = kernel_frame(M, tol);
  SectionList cand;
  for (int c = 0; c < K.cols; ++c) {
    SectionJets out;
    for (int b = 0; b < dn; ++b) out.vec.push_back(K(dm + b, c));
    JetList alpha(dm, Jet::constant(0.0, dn));
    for (int a = 0; a < dm; ++a) {
      for (int j = 0; j < dm; ++j) alpha[j] += K(a, c) * s[a].form[j];
    }
    for (int b = 0; b < dn; ++b) {
      Jet v = Jet::constant(0.0, dn);
      for (int j = 0; j < dm; ++j) v += E(j, b) * alpha[j];
      out.form.push_back(v);
    }
    cand.push_back(std::move(out));
  }
  const std::vector<int> pick = cand.empty() ? std::vector<int>{} : independent_subset(fiber_matrix(cand), tol);
  if (static_cast<int>(pick.size()) != dn) {
    throw RankError("restrict_to_level_set", "restricted fiber has dimension " + std::to_string(pick.size()) +
                                                 " instead of " + std::to_string(dn) + " at " + format_point(x));
  }
  SectionList out;
  for (int i : pick) out.push_back(cand[i]);
  return out;
}

}  // namespace

DiracStructure restrict_to_level_set(const DiracStructure& d, const LevelSet& ls, double tol) {
  if (!ls.chart) throw InputError("level set without a chart");
  require_same_chart(ls.embedding.source(), ls.chart, "restrict_to_level_set");
  require_same_chart(ls.embedding.target(), d.chart(), "restrict_to_level_set");
  return DiracStructure(ls.chart, [d, ls, tol](const Point& x) { return restricted_sections(d, ls, x, tol); });
}

int restriction_rank(const DiracStructure& d, const LevelSet& ls, const std::vector<Point>& points, double tol) {
  int rank = -1;
  Point first;
  for (const Point& x : points) {
    const Point m = ls.embedding(x);
    const Subspace g1 = characteristic_spaces(d, m).G1;
    const Subspace tn(d.dim(), ls.embedding.jacobian(x), tol);
    const int r = intersect(g1, tn).dim();
    if (rank < 0) {
      rank = r;
      first = x;
    } else if (r != rank) {
      throw RankError("restrict_to_level_set", "dim(G1 ∩ TN) is " + std::to_string(rank) + " at " +
                                                   format_point(first) + " but " + std::to_string(r) + " at " +
                                                   format_point(x));
    }
  }
  return rank;
}

}  // namespace dk
