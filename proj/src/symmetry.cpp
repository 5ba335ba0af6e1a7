#include "dirackit/symmetry.hpp"

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

double max_norm(const std::vector<JetList>& fields) {
  double s = 0.0;
  for (const JetList& f : fields) s = std::max(s, values(f).norm());
  return s;
}

void require_action_chart(const SymmetryAction& a, const ChartPtr& chart, const char* what) {
  for (const VectorField& g : a.generators) require_same_chart(chart, g.chart(), what);
  if (a.chart) require_same_chart(chart, a.chart, what);
}

JetMatrix jacobian_jets(const JetList& f, int n) {
  const int dim = f.empty() ? n : f.front().dim();
  JetMatrix J(static_cast<int>(f.size()), n, dim);
  for (std::size_t b = 0; b < f.size(); ++b) {
    for (int j = 0; j < n; ++j) J(static_cast<int>(b), j) = derivative(f[b], j);
  }
  return J;
}

}  // namespace

double SymmetryAction::c(int l, int i, int j) const {
  if (structure_constants.empty()) return 0.0;
  const int k = size();
  return structure_constants[static_cast<std::size_t>((l * k + i) * k + j)];
}

std::vector<JetList> SymmetryAction::generator_jets(const Point& m) const {
  std::vector<JetList> out;
  out.reserve(generators.size());
  for (const VectorField& g : generators) out.push_back(g.eval(m));
  return out;
}

Eigen::MatrixXd SymmetryAction::generator_matrix(const Point& m) const {
  Eigen::MatrixXd w(m.size(), size());
  for (int a = 0; a < size(); ++a) w.col(a) = generators[a].values(m);
  return w;
}

PointMap compose_maps(const PointMap& outer, const PointMap& inner) {
  require_same_chart(inner.target(), outer.source(), "compose_maps");
  const Field oc = outer.components();
  const Field ic = inner.components();
  return PointMap(inner.source(), outer.target(),
                  Field(inner.source(), outer.target()->dim(),
                        [oc, ic](const Point& x) { return oc.eval_composed(ic.eval(x)); }));
}

Subspace vertical_space(const SymmetryAction& a, const Point& m) {
  const int n = static_cast<int>(m.size());
  if (a.size() == 0) return Subspace::zero(n);
  const Eigen::MatrixXd w = a.generator_matrix(m);
  if (w.isZero(0.0)) return Subspace::zero(n);
  const Subspace v(n, w);
  if (v.dim() != a.size()) {
    throw RankError("vertical_space", "generators of '" + a.name + "' span " + std::to_string(v.dim()) +
                                          " < " + std::to_string(a.size()) + " dimensions at " + format_point(m));
  }
  return v;
}

CheckOutcome check_structure_constants(const SymmetryAction& a, const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  const int k = a.size();
  if (!a.structure_constants.empty() && static_cast<int>(a.structure_constants.size()) != k * k * k) {
    throw DimensionError("structure constants of '" + a.name + "' need k^3 = " + std::to_string(k * k * k) +
                         " entries");
  }
  for (const Point& m : points) {
    const std::vector<JetList> xi = a.generator_jets(m);
    const double scale = std::max(max_norm(xi), 1.0);
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        Eigen::VectorXd r = values(jets::bracket(xi[i], xi[j]));
        for (int l = 0; l < k; ++l) r += a.c(l, i, j) * values(xi[l]);
        out.record(r.norm() / scale, m, tol,
                   "[xi" + std::to_string(i + 1) + ", xi" + std::to_string(j + 1) + "] off the structure constants");
      }
    }
  }
  return out;
}

CheckOutcome check_dirac_invariance(const DiracStructure& d, const SymmetryAction& a, const std::vector<Point>& points,
                                    double tol) {
  require_action_chart(a, d.chart(), "check_dirac_invariance");
  CheckOutcome out;
  const int n = d.dim();
  for (const Point& m : points) {
    const SectionList s = d.sections(m);
    const Eigen::MatrixXd cols = fiber_matrix(s);
    const Subspace f(2 * n, cols, tol);
    const std::vector<JetList> xi = a.generator_jets(m);
    for (int g = 0; g < a.size(); ++g) {
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v(2 * n);
        v << values(jets::bracket(xi[g], s[i].vec)), values(jets::lie_derivative(xi[g], s[i].form));
        out.record(membership_residual(f, cols, v), m, tol,
                   "Lie derivative of section " + std::to_string(i + 1) + " along generator " +
                       std::to_string(g + 1) + " leaves D");
      }
    }
  }
  return out;
}

CheckOutcome validate_quotient(const SymmetryAction& a, const QuotientChart& q, const std::vector<Point>& reduced_points,
                               const std::vector<Point>& points, double tol) {
  require_same_chart(q.projection.target(), q.reduced, "validate_quotient");
  require_same_chart(q.slice.source(), q.reduced, "validate_quotient");
  require_same_chart(q.projection.source(), q.slice.target(), "validate_quotient");
  CheckOutcome out;
  const int nbar = q.reduced->dim();
  for (const Point& m : points) {
    const Eigen::MatrixXd jp = q.projection.jacobian(m);
    const Eigen::MatrixXd w = a.generator_matrix(m);
    const double scale = std::max(jp.norm() * w.norm(), 1e-300);
    out.record((jp * w).norm() / scale, m, tol, "projection is not invariant");
  }
  for (const Point& mb : reduced_points) {
    const Point m = q.slice(mb);
    out.record((q.projection(m) - mb).norm() / std::max(1.0, mb.norm()), mb, tol, "projection o slice != id");
    if (numeric_rank(q.projection.jacobian(m), tol) != nbar) out.fail(mb, "projection Jacobian not of full rank");
  }
  return out;
}

SectionList d_cap_k_perp_sections(const DiracStructure& d, const SymmetryAction& a, const Point& m, double tol) {
  const int n = d.dim();
  SectionList s = d.sections(m);
  if (a.size() == 0) return s;
  const std::vector<JetList> xi = a.generator_jets(m);
  const int dim = s.front().form.front().dim();
  JetMatrix P(a.size(), n, dim);
  double form_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    form_scale = std::max(form_scale, values(s[i].form).norm());
    for (int g = 0; g < a.size(); ++g) P(g, i) = jets::pair(s[i].form, xi[g]);
  }
  const JetMatrix K = kernel_frame(P, tol, form_scale * max_norm(xi));
  SectionList out;
  for (int c = 0; c < K.cols; ++c) {
    SectionJets sec{JetList(n, Jet::constant(0.0, dim)), JetList(n, Jet::constant(0.0, dim))};
    for (int i = 0; i < n; ++i) {
      const Jet& w = K(i, c);
      for (int j = 0; j < n; ++j) {
        sec.vec[j] += w * s[i].vec[j];
        sec.form[j] += w * s[i].form[j];
      }
    }
    out.push_back(std::move(sec));
  }
  return out;
}

Subspace d_cap_k_perp_fiber(const DiracStructure& d, const SymmetryAction& a, const Point& m, double tol) {
  const SectionList s = d_cap_k_perp_sections(d, a, m, tol);
  if (s.empty()) return Subspace::zero(2 * d.dim(), tol);
  return Subspace(2 * d.dim(), fiber_matrix(s), tol);
}

int d_cap_k_perp_rank(const DiracStructure& d, const SymmetryAction& a, const std::vector<Point>& points, double tol) {
  int rank = -1;
  Point first;
  for (const Point& m : points) {
    const int r = d_cap_k_perp_fiber(d, a, m, tol).dim();
    if (rank < 0) {
      rank = r;
      first = m;
    } else if (r != rank) {
      throw RankError("d_cap_k_perp", "rank of D ∩ K-perp is " + std::to_string(rank) + " at " + format_point(first) +
                                          " but " + std::to_string(r) + " at " + format_point(m));
    }
  }
  return rank;
}

namespace {

SectionList reduced_sections(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q,
                             const Point& mb, double tol) {
  const int n = d.dim();
  const int nbar = q.reduced->dim();
  const JetList inner = q.slice.eval(mb);
  const Point m = values(inner);
  SectionList s = d_cap_k_perp_sections(d, a, m, tol);
  const JetMatrix jp = jacobian_jets(q.projection.eval(m), n);
  JetMatrix jpc(nbar, n, nbar);
  for (int b = 0; b < nbar; ++b) {
    for (int j = 0; j < n; ++j) jpc(b, j) = compose(jp(b, j), inner);
  }
  const JetMatrix ds = jacobian_jets(inner, nbar);
  SectionList cand;
  for (SectionJets& sec : s) {
    for (Jet& j : sec.vec) j = compose(j, inner);
    for (Jet& j : sec.form) j = compose(j, inner);
    SectionJets r{JetList(nbar, Jet::constant(0.0, nbar)), JetList(nbar, Jet::constant(0.0, nbar))};
    for (int b = 0; b < nbar; ++b) {
      for (int j = 0; j < n; ++j) {
        r.vec[b] += jpc(b, j) * sec.vec[j];
        r.form[b] += sec.form[j] * ds(j, b);
      }
    }
    cand.push_back(std::move(r));
  }
  const std::vector<int> pick = cand.empty() ? std::vector<int>{} : independent_subset(fiber_matrix(cand), tol);
  if (static_cast<int>(pick.size()) != nbar) {
    throw RankError("reduce_dirac", "pushed-down sections span " + std::to_string(pick.size()) + " instead of " +
                                        std::to_string(nbar) + " dimensions at " + format_point(mb));
  }
  SectionList out;
  for (int i : pick) out.push_back(cand[i]);
  return out;
}

}  // namespace

DiracStructure reduce_dirac(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q, double tol) {
  require_action_chart(a, d.chart(), "reduce_dirac");
  require_same_chart(q.slice.target(), d.chart(), "reduce_dirac");
  require_same_chart(q.projection.source(), d.chart(), "reduce_dirac");
  require_same_chart(q.slice.source(), q.reduced, "reduce_dirac");
  return DiracStructure(q.reduced, [d, a, q, tol](const Point& mb) { return reduced_sections(d, a, q, mb, tol); });
}

double right_inverse_deviation(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q,
                               const std::vector<Point>& reduced_points, std::uint64_t seed, double tol) {
  Sampler rng(seed);
  const int nbar = q.reduced->dim();
  double worst = 0.0;
  for (const Point& mb : reduced_points) {
    const Point m = q.slice(mb);
    const Eigen::MatrixXd ds = q.slice.jacobian(mb);
    const Eigen::MatrixXd w = a.generator_matrix(m);
    Eigen::MatrixXd z(a.size(), nbar);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
    const Eigen::MatrixXd r2 = ds + w * z;
    for (const SectionJets& s : d_cap_k_perp_sections(d, a, m, tol)) {
      const Eigen::VectorXd alpha = values(s.form);
      const Eigen::VectorXd a1 = ds.transpose() * alpha;
      const Eigen::VectorXd a2 = r2.transpose() * alpha;
      const double ref = std::max({alpha.norm(), a1.norm(), 1e-300});
      worst = std::max(worst, (a1 - a2).norm() / ref);
    }
  }
  return worst;
}

CheckOutcome verify_method_b(const DiracStructure& d, const SymmetryAction& a, const QuotientChart& q,
                             const DiracStructure& d_red, const std::vector<Point>& reduced_points, double tol) {
  CheckOutcome out;
  const int n = d.dim();
  const int nbar = q.reduced->dim();
  const int k = a.size();
  for (const Point& mb : reduced_points) {
    const Point m = q.slice(mb);
    const Eigen::MatrixXd jp = q.projection.jacobian(m);
    const Eigen::MatrixXd ds = q.slice.jacobian(mb);
    const Eigen::MatrixXd w = a.generator_matrix(m);
    const Eigen::MatrixXd dcols = d.fiber_matrix(m);
    const Eigen::MatrixXd rcols = d_red.fiber_matrix(mb);
    const Subspace rfib(2 * nbar, rcols, tol);
    double dscale = 0.0;
    for (Eigen::Index c = 0; c < dcols.cols(); ++c) dscale = std::max(dscale, dcols.col(c).norm());

    // D_red inside the pushed-down structure: lift each section and solve for a D-element.
    Eigen::MatrixXd sys(2 * n, n + k);
    sys.leftCols(n) = dcols;
    sys.rightCols(k).setZero();
    sys.topRightCorner(n, k) = -w;
    for (Eigen::Index c = 0; c < rcols.cols(); ++c) {
      Eigen::VectorXd rhs(2 * n);
      rhs << ds * rcols.col(c).head(nbar), jp.transpose() * rcols.col(c).tail(nbar);
      const Eigen::VectorXd sol = sys.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
      const double ref = std::max(rhs.norm(), dscale);
      out.record(ref > 0.0 ? (sys * sol - rhs).norm() / ref : 0.0, mb, tol,
                 "reduced section " + std::to_string(c + 1) + " has no lift in D");
    }

    // Pushed-down structure inside D_red: elements of D with form part in V°.
    const Subspace dfib(2 * n, dcols, tol);
    const Eigen::MatrixXd Q = dfib.basis();
    const Eigen::MatrixXd P = w.transpose() * Q.bottomRows(n);
    const Eigen::MatrixXd N = null_space(P, tol, std::max(w.norm(), 1.0));
    const Eigen::MatrixXd E = Q * N;
    const auto jpt = jp.transpose().jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
    for (Eigen::Index c = 0; c < E.cols(); ++c) {
      const Eigen::VectorXd alpha = E.col(c).tail(n);
      const Eigen::VectorXd abar = jpt.solve(alpha);
      Eigen::VectorXd v(2 * nbar);
      v << jp * E.col(c).head(n), abar;
      out.record(rfib.residual(v, 1.0), mb, tol, "pushed-down D element outside D_red");
    }
  }
  return out;
}

CheckOutcome is_descending_field(const VectorField& X, const SymmetryAction& a, const std::vector<Point>& points,
                                 double tol) {
  require_action_chart(a, X.chart(), "is_descending_field");
  CheckOutcome out;
  for (const Point& m : points) {
    const JetList x = X.eval(m);
    const std::vector<JetList> xi = a.generator_jets(m);
    const Subspace v = a.size() ? Subspace(static_cast<int>(m.size()), a.generator_matrix(m), tol)
                                : Subspace::zero(static_cast<int>(m.size()), tol);
    for (int g = 0; g < a.size(); ++g) {
      const Eigen::VectorXd br = values(jets::bracket(x, xi[g]));
      const double scale = std::max(values(x).norm(), values(xi[g]).norm());
      out.record(v.residual(br, scale), m, tol, "[X, xi" + std::to_string(g + 1) + "] not vertical");
    }
  }
  return out;
}

CheckOutcome g0_pushdown(const DiracStructure& d, const QuotientChart& q, const DiracStructure& d_red,
                         const std::vector<Point>& reduced_points, double tol) {
  CheckOutcome out;
  for (const Point& mb : reduced_points) {
    const Point m = q.slice(mb);
    const Subspace g0 = characteristic_spaces(d, m).G0;
    const Subspace g0r = characteristic_spaces(d_red, mb).G0;
    const Eigen::MatrixXd jp = q.projection.jacobian(m);
    for (int c = 0; c < g0.dim(); ++c) {
      const Eigen::VectorXd v = jp * g0.basis().col(c);
      out.record(g0r.dim() ? g0r.residual(v, 1.0) : v.norm(), mb, tol, "T pi(G0) not inside reduced G0");
    }
  }
  return out;
}

Subspace closed_optimal_distribution(const DiracStructure& d, const SymmetryAction& a, const Point& m, double tol) {
  const int n = d.dim();
  const SectionList s = d_cap_k_perp_sections(d, a, m, tol);
  if (s.empty()) return Subspace::zero(n, tol);
  Eigen::MatrixXd cols(n, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = values(s[i].vec);
  return Subspace(n, cols, tol);
}

}  // namespace dk
