#include "dirackit/nonholonomic.hpp"

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

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

double max_norm(const std::vector<JetList>& fields) {
  double s = 0.0;
  for (const JetList& f : fields) s = std::max(s, values(f).norm());
  return s;
}

Eigen::MatrixXd columns(const std::vector<JetList>& fields, int n) {
  Eigen::MatrixXd m(n, fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = values(fields[i]);
  return m;
}

Subspace span(const std::vector<JetList>& fields, int n, double tol) {
  if (fields.empty()) return Subspace::zero(n, tol);
  return Subspace(n, columns(fields, n), tol);
}

JetList combine(const std::vector<JetList>& basis, const JetMatrix& coeffs, int col, int n, int dim) {
  JetList out(n, Jet::constant(0.0, dim));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Jet& w = coeffs(static_cast<int>(i), col);
    for (int j = 0; j < n; ++j) out[j] += w * basis[i][j];
  }
  return out;
}

Eigen::MatrixXd matrix_values(const JetList& flat, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = flat[static_cast<std::size_t>(i * n + j)].value();
  }
  return m;
}

/// Frames of H, V ∩ H and U at one point, as jets in the M chart.
struct LocalFrames {
  int n = 0;
  int dim = 0;
  JetList omega;
  std::vector<JetList> beta;
  std::vector<JetList> H;
  std::vector<JetList> xi;
  std::vector<JetList> VH;
  std::vector<JetList> U;
};

std::vector<JetList> horizontal_frame(const std::vector<JetList>& beta, int n, int dim, double tol) {
  std::vector<JetList> H;
  if (beta.empty()) {
    for (int i = 0; i < n; ++i) {
      JetList e(n, Jet::constant(0.0, dim));
      e[i] = Jet::constant(1.0, dim);
      H.push_back(e);
    }
    return H;
  }
  JetMatrix B(static_cast<int>(beta.size()), n, dim);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    for (int i = 0; i < n; ++i) B(static_cast<int>(j), i) = beta[j][i];
  }
  const JetMatrix K = kernel_frame(B, tol, max_norm(beta));
  for (int c = 0; c < K.cols; ++c) H.push_back(K.column(c));
  return H;
}

LocalFrames local_frames(const NonholonomicModel& model, const SymmetryAction* a, const Point& m, double tol) {
  LocalFrames f;
  f.n = static_cast<int>(m.size());
  f.dim = f.n;
  f.omega = model.omega.eval(m);
  for (const OneForm& b : model.beta) f.beta.push_back(b.eval(m));
  f.H = horizontal_frame(f.beta, f.n, f.dim, tol);
  if (!a) return f;
  f.xi = a->generator_jets(m);
  const int k = a->size();
  const int kc = static_cast<int>(f.beta.size());
  if (k == 0) {
    f.U = f.H;
    return f;
  }
  if (kc == 0) {
    f.VH = f.xi;
  } else {
    JetMatrix M1(kc, k, f.dim);
    for (int j = 0; j < kc; ++j) {
      for (int g = 0; g < k; ++g) M1(j, g) = jets::pair(f.beta[j], f.xi[g]);
    }
    const JetMatrix G = kernel_frame(M1, tol, max_norm(f.beta) * max_norm(f.xi));
    for (int c = 0; c < G.cols; ++c) f.VH.push_back(combine(f.xi, G, c, f.n, f.dim));
  }
  if (f.VH.empty()) {
    f.U = f.H;
    return f;
  }
  const int r = static_cast<int>(f.VH.size());
  const int h = static_cast<int>(f.H.size());
  JetMatrix N(r, h, f.dim);
  for (int b = 0; b < r; ++b) {
    for (int i = 0; i < h; ++i) N(b, i) = jets::two_form_apply(f.omega, f.VH[b], f.H[i]);
  }
  const double scale = values(f.omega).norm() * max_norm(f.VH) * max_norm(f.H);
  const JetMatrix C = kernel_frame(N, tol, scale);
  for (int c = 0; c < C.cols; ++c) f.U.push_back(combine(f.H, C, c, f.n, f.dim));
  return f;
}

Eigen::VectorXd lstsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Mechanical system and constraint phase space

Eigen::MatrixXd MechanicalSystem::metric_at(const Point& q) const {
  const Eigen::VectorXd v = metric.values(q);
  const int d = dim();
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = v(i * d + j);
  }
  return g;
}

CheckOutcome check_system(const MechanicalSystem& s, const std::vector<Point>& q_points, double tol) {
  CheckOutcome out;
  const int d = s.dim();
  const int k = static_cast<int>(s.constraints.size());
  for (const Point& q : q_points) {
    const Eigen::MatrixXd g = s.metric_at(q);
    const double scale = std::max(g.norm(), 1e-300);
    out.record((g - g.transpose()).norm() / scale, q, tol, "metric not symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    if (es.eigenvalues()(0) <= tol * scale) out.fail(q, "metric not positive definite");
    if (k > 0) {
      Eigen::MatrixXd phi(k, d);
      for (int j = 0; j < k; ++j) phi.row(j) = s.constraints[j].values(q).transpose();
      if (numeric_rank(phi, tol) != k) out.fail(q, "constraint forms dependent");
    }
  }
  return out;
}

Eigen::VectorXd legendre(const MechanicalSystem& s, const Point& q, const Eigen::VectorXd& v) {
  return s.metric_at(q) * v;
}

Eigen::VectorXd inverse_legendre(const MechanicalSystem& s, const Point& q, const Eigen::VectorXd& p) {
  return s.metric_at(q).ldlt().solve(p);
}

std::string momentum_name(const std::string& coord) { return "p_" + coord; }

ChartPtr cotangent_chart(const ChartPtr& q_chart, double bound) {
  std::vector<std::string> coords = q_chart->coords();
  std::vector<Interval> box = q_chart->box();
  for (const std::string& c : q_chart->coords()) {
    coords.push_back(momentum_name(c));
    box.push_back({-bound, bound});
  }
  return make_chart(q_chart->name() + "/T*Q", coords, box);
}

namespace {

Eigen::MatrixXd constraint_matrix(const MechanicalSystem& s, const Point& q) {
  const int d = s.dim();
  const int k = static_cast<int>(s.constraints.size());
  Eigen::MatrixXd phi(k, d);
  for (int j = 0; j < k; ++j) phi.row(j) = s.constraints[j].values(q).transpose();
  // C = phi g^-1, so that C p = phi(g^-1 p).
  return s.metric_at(q).ldlt().solve(phi.transpose()).transpose();
}

double block_quality(const Eigen::MatrixXd& C, const std::vector<int>& cols) {
  Eigen::MatrixXd b(C.rows(), cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = C.col(cols[i]);
  const Eigen::VectorXd sb = b.jacobiSvd().singularValues();
  const Eigen::VectorXd sc = C.jacobiSvd().singularValues();
  if (sc.size() == 0 || sc(0) == 0.0) return 0.0;
  return sb(sb.size() - 1) / sc(0);
}

std::vector<int> momentum_indices(const MechanicalSystem& s, const std::vector<std::string>& names) {
  std::vector<int> idx;
  for (const std::string& nm : names) {
    int found = -1;
    for (int i = 0; i < s.dim(); ++i) {
      if (momentum_name(s.q_chart->coords()[i]) == nm) found = i;
    }
    if (found < 0) throw InputError("unknown momentum '" + nm + "' to eliminate");
    if (std::find(idx.begin(), idx.end(), found) != idx.end()) throw InputError("momentum '" + nm + "' listed twice");
    idx.push_back(found);
  }
  return idx;
}

}  // namespace

std::vector<std::string> best_elimination(const MechanicalSystem& s, const std::vector<Point>& q_points) {
  const int d = s.dim();
  const int k = static_cast<int>(s.constraints.size());
  if (k == 0) return {};
  std::vector<Eigen::MatrixXd> cs;
  for (const Point& q : q_points) cs.push_back(constraint_matrix(s, q));
  std::vector<int> best;
  double best_score = -1.0;
  std::vector<bool> mask(d, false);
  std::fill(mask.begin(), mask.begin() + k, true);
  do {
    std::vector<int> cols;
    for (int i = 0; i < d; ++i) {
      if (mask[i]) cols.push_back(i);
    }
    double score = q_points.empty() ? 0.0 : 1e300;
    for (const Eigen::MatrixXd& C : cs) score = std::min(score, block_quality(C, cols));
    if (score > best_score) {
      best_score = score;
      best = cols;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  std::vector<std::string> out;
  for (int i : best) out.push_back(momentum_name(s.q_chart->coords()[i]));
  return out;
}

ConstraintPhase build_constraint_phase(const MechanicalSystem& s, const std::vector<std::string>& eliminate,
                                       int check_samples, std::uint64_t seed) {
  const int d = s.dim();
  const int k = static_cast<int>(s.constraints.size());
  for (const OneForm& phi : s.constraints) require_same_chart(s.q_chart, phi.chart(), "build_constraint_phase");
  require_same_chart(s.q_chart, s.metric.chart(), "build_constraint_phase");
  if (s.metric.size() != d * d) throw DimensionError("metric needs d^2 = " + std::to_string(d * d) + " entries");
  const std::vector<Point> qs = sample_points(*s.q_chart, std::max(check_samples, 1), seed);
  std::vector<std::string> elim = eliminate;
  if (elim.empty() && k > 0) elim = best_elimination(s, qs);
  if (static_cast<int>(elim.size()) != k) {
    throw InputError("eliminating " + std::to_string(elim.size()) + " momenta for " + std::to_string(k) +
                     " constraints");
  }
  const std::vector<int> eidx = momentum_indices(s, elim);
  std::vector<int> fidx;
  for (int i = 0; i < d; ++i) {
    if (std::find(eidx.begin(), eidx.end(), i) == eidx.end()) fidx.push_back(i);
  }

  ConstraintPhase c;
  c.q_dim = d;
  c.eliminated = elim;
  c.tq_chart = cotangent_chart(s.q_chart);
  std::vector<std::string> coords = s.q_chart->coords();
  std::vector<Interval> box = s.q_chart->box();
  for (int i : fidx) {
    coords.push_back(momentum_name(s.q_chart->coords()[i]));
    box.push_back(c.tq_chart->box()[d + i]);
  }
  std::vector<Predicate> excluded;
  for (const Predicate& pr : s.q_chart->excluded()) {
    excluded.push_back([pr, d](const Point& m) { return pr(m.head(d)); });
  }
  c.m_chart = make_chart(s.name + "/M", coords, box, excluded);
  const int n = c.m_chart->dim();

  const MechanicalSystem sys = s;
  auto embed = [sys, d, k, n, eidx, fidx, elim](const Point& m) {
    const JetList x = coordinate_jets(m);
    const JetList q(x.begin(), x.begin() + d);
    const JetList gflat = sys.metric.eval_composed(q);
    JetMatrix g(d, d, n);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) g(i, j) = gflat[static_cast<std::size_t>(i * d + j)];
    }
    JetList p(d, Jet::constant(0.0, n));
    for (std::size_t f = 0; f < fidx.size(); ++f) p[fidx[f]] = x[d + f];
    if (k > 0) {
      JetMatrix phiT(d, k, n);
      for (int j = 0; j < k; ++j) {
        const JetList phi = sys.constraints[j].eval_composed(q);
        for (int i = 0; i < d; ++i) phiT(i, j) = phi[i];
      }
      const JetMatrix CT = solve(g, phiT);  // g^-1 phi^T, d x k
      JetMatrix ce(k, k, n);
      JetMatrix rhs(k, 1, n);
      for (int j = 0; j < k; ++j) {
        for (int e = 0; e < k; ++e) ce(j, e) = CT(eidx[e], j);
        for (int f : fidx) rhs(j, 0) -= CT(f, j) * p[f];
      }
      if (numeric_rank(ce.values(), 1e-12) < k) {
        const Point qv = m.head(d);
        throw RankError("build_constraint_phase", "elimination block for {" + join(elim) + "} is singular at q = " +
                                                      format_point(qv) + "; try eliminating {" +
                                                      join(best_elimination(sys, {qv})) + "}");
      }
      const JetMatrix pe = solve(ce, rhs);
      for (int e = 0; e < k; ++e) p[eidx[e]] = pe(e, 0);
    }
    JetList out(q);
    out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  c.embedding = PointMap(c.m_chart, c.tq_chart, Field(c.m_chart, 2 * d, embed));
  c.base_projection = PointMap(c.m_chart, s.q_chart, Field(c.m_chart, d, [d](const Point& m) {
                                 const JetList x = coordinate_jets(m);
                                 return JetList(x.begin(), x.begin() + d);
                               }));
  for (const Point& m : sample_points(*c.m_chart, std::max(check_samples, 1), seed)) {
    const double defect = constraint_defect(s, c, m);
    if (defect > 1e-9) {
      throw RankError("build_constraint_phase", "embedded point violates the constraints by " +
                                                    std::to_string(defect) + " at " + format_point(m));
    }
  }
  return c;
}

double constraint_defect(const MechanicalSystem& s, const ConstraintPhase& c, const Point& m) {
  const int d = s.dim();
  const Point e = c.embedding(m);
  const Point q = e.head(d);
  const Eigen::VectorXd v = inverse_legendre(s, q, e.tail(d));
  double worst = 0.0;
  for (const OneForm& phi : s.constraints) worst = std::max(worst, std::abs(phi.values(q).dot(v)));
  return worst / std::max(1.0, v.norm());
}

TwoForm omega_M(const ConstraintPhase& c) {
  const int d = c.q_dim;
  const int n = c.m_chart->dim();
  const PointMap emb = c.embedding;
  return TwoForm(Field(c.m_chart, n * n, [emb, d, n](const Point& m) {
    const JetList e = emb.eval(m);
    std::vector<JetList> dq(d), dp(d);
    for (int i = 0; i < d; ++i) {
      for (int a = 0; a < n; ++a) {
        dq[i].push_back(derivative(e[i], a));
        dp[i].push_back(derivative(e[d + i], a));
      }
    }
    JetList w(static_cast<std::size_t>(n * n), Jet(0.0, n, 1));
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        Jet s(0.0, n, 1);
        for (int i = 0; i < d; ++i) s += dq[i][a] * dp[i][b] - dq[i][b] * dp[i][a];
        w[static_cast<std::size_t>(a * n + b)] = s;
        w[static_cast<std::size_t>(b * n + a)] = -s;
      }
    }
    return w;
  }));
}

std::vector<OneForm> horizontal_annihilator_forms(const MechanicalSystem& s, const ConstraintPhase& c) {
  std::vector<OneForm> out;
  for (const OneForm& phi : s.constraints) out.push_back(pullback(c.base_projection, phi));
  return out;
}

Subspace horizontal_H(const MechanicalSystem& s, const ConstraintPhase& c, const Point& m) {
  const int n = c.m_chart->dim();
  const std::vector<OneForm> beta = horizontal_annihilator_forms(s, c);
  if (beta.empty()) return Subspace::full(n);
  Eigen::MatrixXd b(beta.size(), n);
  for (std::size_t j = 0; j < beta.size(); ++j) b.row(static_cast<Eigen::Index>(j)) = beta[j].values(m).transpose();
  const Eigen::MatrixXd k = null_space(b, default_tolerance(), 0.0);
  return k.cols() ? Subspace(n, k) : Subspace::zero(n);
}

ScalarField hamiltonian(const MechanicalSystem& s, const ConstraintPhase& c) {
  const int d = s.dim();
  const int n = c.m_chart->dim();
  const PointMap emb = c.embedding;
  const MechanicalSystem sys = s;
  return ScalarField(Field(c.m_chart, 1, [emb, sys, d, n](const Point& m) {
    const JetList e = emb.eval(m);
    const JetList q(e.begin(), e.begin() + d);
    const JetList gflat = sys.metric.eval_composed(q);
    JetMatrix g(d, d, n);
    JetMatrix p(d, 1, n);
    for (int i = 0; i < d; ++i) {
      p(i, 0) = e[d + i];
      for (int j = 0; j < d; ++j) g(i, j) = gflat[static_cast<std::size_t>(i * d + j)];
    }
    const JetMatrix v = solve(g, p);
    Jet h = Jet::constant(0.0, n);
    for (int i = 0; i < d; ++i) h += 0.5 * p(i, 0) * v(i, 0);
    if (sys.potential.chart()) h += sys.potential.eval_composed(q).front();
    return JetList{h};
  }));
}

DiracStructure nonholonomic_dirac(const MechanicalSystem& s, const ConstraintPhase& c) {
  return graph_of_two_form(c.m_chart, horizontal_annihilator_forms(s, c), omega_M(c));
}

NonholonomicModel build_model(const MechanicalSystem& s, const std::vector<std::string>& eliminate) {
  NonholonomicModel model;
  model.system = s;
  model.phase = build_constraint_phase(s, eliminate);
  model.omega = omega_M(model.phase);
  model.beta = horizontal_annihilator_forms(s, model.phase);
  model.dirac = graph_of_two_form(model.phase.m_chart, model.beta, model.omega);
  model.hamiltonian = hamiltonian(s, model.phase);
  return model;
}

double omega_H_conditioning(const NonholonomicModel& model, const Point& m) {
  const int n = model.phase.m_chart->dim();
  const LocalFrames f = local_frames(model, nullptr, m, default_tolerance());
  const Eigen::MatrixXd H = columns(f.H, n);
  const Eigen::MatrixXd w = matrix_values(f.omega, n);
  const Eigen::VectorXd s = (H.transpose() * w * H).jacobiSvd().singularValues();
  if (s.size() == 0) return 1.0;
  return s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
}

void require_nondegenerate_omega_H(const NonholonomicModel& model, const std::vector<Point>& points, double tol) {
  for (const Point& m : points) {
    if (omega_H_conditioning(model, m) <= tol) {
      throw RankError("nonholonomic_dirac", "omega_M is degenerate on H at " + format_point(m));
    }
  }
}

// ---------------------------------------------------------------------------
// Lifted actions and momentum maps

LiftedAction lifted_action(const ConstraintPhase& c, const std::string& name, const std::vector<VectorField>& base,
                           const std::vector<double>& structure_constants) {
  const int d = c.q_dim;
  const int n = c.m_chart->dim();
  std::vector<int> free_index;
  for (int a = d; a < n; ++a) {
    const std::string& coord = c.m_chart->coords()[a];
    int found = -1;
    for (int i = 0; i < d; ++i) {
      if (momentum_name(c.tq_chart->coords()[i]) == coord) found = i;
    }
    free_index.push_back(found);
  }
  LiftedAction l;
  l.base_generators = base;
  l.action.name = name;
  l.action.chart = c.m_chart;
  l.action.structure_constants = structure_constants;
  const PointMap emb = c.embedding;
  for (const VectorField& g : base) {
    if (g.chart()->dim() != d) throw DimensionError("base generator on a chart of the wrong dimension");
    l.action.generators.push_back(VectorField(Field(c.m_chart, n, [emb, g, d, n, free_index](const Point& m) {
      const JetList e = emb.eval(m);
      const JetList q(e.begin(), e.begin() + d);
      const JetList local = g.eval(values(q));
      JetList out;
      for (int i = 0; i < d; ++i) out.push_back(compose(local[i], q));
      for (int j : free_index) {
        Jet s = Jet::constant(0.0, n);
        for (int i = 0; i < d; ++i) s -= e[d + i] * compose(derivative(local[i], j), q);
        out.push_back(s);
      }
      return out;
    })));
  }
  return l;
}

CheckOutcome lift_tangency(const ConstraintPhase& c, const LiftedAction& l, const std::vector<Point>& points,
                           double tol) {
  CheckOutcome out;
  const int d = c.q_dim;
  for (const Point& m : points) {
    const Eigen::MatrixXd J = c.embedding.jacobian(m);
    const Point e = c.embedding(m);
    for (int g = 0; g < l.action.size(); ++g) {
      const Eigen::VectorXd xm = l.action.generators[g].values(m);
      const JetList base = l.base_generators[g].eval(e.head(d));
      Eigen::VectorXd lift(2 * d);
      for (int i = 0; i < d; ++i) lift(i) = base[i].value();
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s -= e(d + i) * base[i].d(j);
        lift(d + j) = s;
      }
      out.record((J * xm - lift).norm() / std::max(1.0, lift.norm()), m, tol,
                 "generator " + std::to_string(g + 1) + " is not tangent to M");
    }
  }
  return out;
}

namespace {

Jet momentum_jet(const PointMap& emb, const std::vector<VectorField>& base, const std::vector<double>& xi,
                 const Point& m, int d) {
  const JetList e = emb.eval(m);
  const JetList q(e.begin(), e.begin() + d);
  Jet s = Jet::constant(0.0, static_cast<int>(m.size()));
  for (std::size_t a = 0; a < base.size(); ++a) {
    if (xi[a] == 0.0) continue;
    const JetList g = base[a].eval_composed(q);
    for (int i = 0; i < d; ++i) s += xi[a] * e[d + i] * g[i];
  }
  return s;
}

std::vector<double> unit(int k, int a) {
  std::vector<double> v(k, 0.0);
  v[a] = 1.0;
  return v;
}

}  // namespace

ScalarField momentum_field(const ConstraintPhase& c, const LiftedAction& l, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != l.action.size()) throw DimensionError("momentum_field: coefficient count");
  const PointMap emb = c.embedding;
  const std::vector<VectorField> base = l.base_generators;
  const int d = c.q_dim;
  return ScalarField(Field(c.m_chart, 1, [emb, base, xi, d](const Point& m) {
    return JetList{momentum_jet(emb, base, xi, m, d)};
  }));
}

double momentum_component(const ConstraintPhase& c, const LiftedAction& l, const std::vector<double>& xi,
                          const Point& m) {
  if (static_cast<int>(xi.size()) != l.action.size()) throw DimensionError("momentum_component: coefficient count");
  return momentum_jet(c.embedding, l.base_generators, xi, m, c.q_dim).value();
}

CheckOutcome momentum_map_residual(const NonholonomicModel& model, const LiftedAction& l,
                                   const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  const int k = l.action.size();
  for (const Point& m : points) {
    const Eigen::MatrixXd w = model.omega.matrix(m);
    for (int a = 0; a < k; ++a) {
      const Eigen::VectorXd xi = l.action.generators[a].values(m);
      const Jet J = momentum_jet(model.phase.embedding, l.base_generators, unit(k, a), m, model.phase.q_dim);
      const Eigen::VectorXd r = w.transpose() * xi - Eigen::VectorXd(J.grad());
      out.record(r.norm() / std::max(1.0, Eigen::VectorXd(J.grad()).norm()), m, tol,
                 "i_xi omega_M != dJ for generator " + std::to_string(a + 1));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// U, D ∩ K-perp and R

Subspace vertical_cap_horizontal(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  const LocalFrames f = local_frames(model, &l.action, m, tol);
  return span(f.VH, f.n, tol);
}

Subspace horizontal_annihilator_U(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  const LocalFrames f = local_frames(model, &l.action, m, tol);
  return span(f.U, f.n, tol);
}

std::vector<JetList> u_frame(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  return local_frames(model, &l.action, m, tol).U;
}

UCompletion d_cap_k_perp_via_U(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  const LocalFrames f = local_frames(model, &l.action, m, tol);
  const int n = f.n;
  const int k = l.action.size();
  const int u = static_cast<int>(f.U.size());
  const int kc = static_cast<int>(f.beta.size());
  std::vector<JetList> iu;
  for (const JetList& X : f.U) iu.push_back(jets::interior(X, f.omega));
  UCompletion out;
  JetMatrix K;
  if (k == 0) {
    K = JetMatrix(u + kc, u + kc, f.dim);
    for (int i = 0; i < u + kc; ++i) K(i, i) = Jet::constant(1.0, f.dim);
  } else {
    JetMatrix Z(k, u + kc, f.dim);
    for (int g = 0; g < k; ++g) {
      for (int a = 0; a < u; ++a) Z(g, a) = jets::pair(iu[a], f.xi[g]);
      for (int j = 0; j < kc; ++j) Z(g, u + j) = jets::pair(f.beta[j], f.xi[g]);
    }
    const double scale = std::max(max_norm(iu), max_norm(f.beta)) * max_norm(f.xi);
    K = kernel_frame(Z, tol, scale);
  }
  for (int c = 0; c < K.cols; ++c) {
    SectionJets s{JetList(n, Jet::constant(0.0, f.dim)), JetList(n, Jet::constant(0.0, f.dim))};
    JetList corr(n, Jet::constant(0.0, f.dim));
    for (int a = 0; a < u; ++a) {
      for (int j = 0; j < n; ++j) {
        s.vec[j] += K(a, c) * f.U[a][j];
        s.form[j] += K(a, c) * iu[a][j];
      }
    }
    for (int b = 0; b < kc; ++b) {
      for (int j = 0; j < n; ++j) corr[j] += K(u + b, c) * f.beta[b][j];
    }
    for (int j = 0; j < n; ++j) s.form[j] += corr[j];
    out.sections.push_back(std::move(s));
    out.corrections.push_back(std::move(corr));
  }
  return out;
}

Subspace reaction_R(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  const UCompletion c = d_cap_k_perp_via_U(model, l, m, tol);
  const int n = static_cast<int>(m.size());
  const Eigen::MatrixXd cols = c.corrections.empty() ? Eigen::MatrixXd(n, 0) : columns(c.corrections, n);
  if (cols.cols() == 0) return Subspace::zero(n, tol);
  // Corrections of size comparable to rounding are absent; compare with the section scale.
  double scale = 0.0;
  for (const SectionJets& s : c.sections) scale = std::max(scale, stack(s).norm());
  if (cols.norm() <= tol * std::max(scale, 1.0)) return Subspace::zero(n, tol);
  return Subspace(n, cols, tol);
}

CheckOutcome check_flat_U_plus_R(const NonholonomicModel& model, const LiftedAction& l,
                                 const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  for (const Point& m : points) {
    const int n = static_cast<int>(m.size());
    const LocalFrames f = local_frames(model, &l.action, m, tol);
    std::vector<JetList> flat;
    for (const JetList& X : f.U) flat.push_back(jets::interior(X, f.omega));
    const Subspace fu = span(flat, n, tol);
    const Subspace r = reaction_R(model, l, m, tol);
    const Subspace v = span(f.xi, n, tol);
    const Subspace vann = annihilator(v);
    const Subspace lhs = sum(fu, r);
    const Subspace rhs = sum(vann, r);
    if (lhs.dim() != fu.dim() + r.dim()) out.fail(m, "flat(U) + R is not direct");
    out.record(std::max(containment_residual(rhs, lhs.basis()), containment_residual(lhs, rhs.basis())), m, tol,
               "flat(U) + R differs from V° + R");
    if (lhs.dim() != rhs.dim()) out.fail(m, "flat(U) + R and V° + R differ in dimension");
  }
  return out;
}

CheckOutcome completion_uniqueness(const NonholonomicModel& model, const LiftedAction& l,
                                   const std::vector<Point>& points, std::uint64_t seed, double tol) {
  CheckOutcome out;
  Sampler rng(seed);
  for (const Point& m : points) {
    const int n = static_cast<int>(m.size());
    const LocalFrames f = local_frames(model, &l.action, m, tol);
    const int k = l.action.size();
    const int kc = static_cast<int>(f.beta.size());
    if (kc == 0 || k == 0) continue;
    std::vector<JetList> hv = f.H;
    hv.insert(hv.end(), f.xi.begin(), f.xi.end());
    if (span(hv, n, tol).dim() != n) continue;
    Eigen::MatrixXd B(k, kc);
    for (int g = 0; g < k; ++g) {
      for (int j = 0; j < kc; ++j) B(g, j) = values(f.beta[j]).dot(values(f.xi[g]));
    }
    const Eigen::MatrixXd w = matrix_values(f.omega, n);
    for (const JetList& U : f.U) {
      Eigen::VectorXd rhs(k);
      for (int g = 0; g < k; ++g) rhs(g) = -values(U).dot(w * values(f.xi[g]));
      const Eigen::VectorXd l1 = lstsq(B, rhs);
      Eigen::VectorXd weights(kc);
      for (int j = 0; j < kc; ++j) weights(j) = rng.uniform(0.5, 2.0);
      const Eigen::VectorXd l2 = weights.asDiagonal() * (B * weights.asDiagonal()).colPivHouseholderQr().solve(rhs);
      out.record((l1 - l2).norm() / std::max(1.0, l1.norm()), m, tol, "V°-completion is not unique");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reduced omega on Hbar

namespace {

struct HBarData {
  Eigen::MatrixXd U;       // n x u
  Eigen::MatrixXd pushed;  // nbar x u
  Eigen::MatrixXd omega;   // n x n
};

HBarData h_bar_data(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q, const Point& mb,
                    double tol) {
  const Point m = q.slice(mb);
  const LocalFrames f = local_frames(model, &l.action, m, tol);
  HBarData h;
  h.U = columns(f.U, f.n);
  h.pushed = q.projection.jacobian(m) * h.U;
  h.omega = matrix_values(f.omega, f.n);
  return h;
}

Eigen::VectorXd lift_to_U(const HBarData& h, const Eigen::VectorXd& xbar, double tol) {
  const Eigen::VectorXd c = lstsq(h.pushed, xbar);
  const double r = (h.pushed * c - xbar).norm() / std::max(xbar.norm(), 1e-300);
  if (xbar.norm() > 0.0 && r > tol) throw InputError("vector is not in Hbar");
  return h.U * c;
}

}  // namespace

Subspace h_bar(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q, const Point& mbar,
               double tol) {
  const HBarData h = h_bar_data(model, l, q, mbar, tol);
  if (h.pushed.cols() == 0) return Subspace::zero(q.reduced->dim(), tol);
  return Subspace(q.reduced->dim(), h.pushed, tol);
}

double omega_h_bar(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q, const Point& mbar,
                   const Eigen::VectorXd& xbar, const Eigen::VectorXd& ybar, double tol) {
  const HBarData h = h_bar_data(model, l, q, mbar, tol);
  return lift_to_U(h, xbar, tol).dot(h.omega * lift_to_U(h, ybar, tol));
}

CheckOutcome check_omega_h_bar(const NonholonomicModel& model, const LiftedAction& l, const QuotientChart& q,
                               const DiracStructure& d_red, const std::vector<Point>& reduced_points, double tol) {
  CheckOutcome out;
  const int nbar = q.reduced->dim();
  for (const Point& mb : reduced_points) {
    const HBarData h = h_bar_data(model, l, q, mb, tol);
    const Subspace hb = h.pushed.cols() ? Subspace(nbar, h.pushed, tol) : Subspace::zero(nbar, tol);
    const CharacteristicSpaces cs = characteristic_spaces(d_red, mb);
    if (!equals(hb, cs.G1)) {
      out.fail(mb, "G1 of D_red differs from Hbar");
      continue;
    }
    const int r = hb.dim();
    std::vector<Eigen::VectorXd> lifts;
    for (int i = 0; i < r; ++i) lifts.push_back(lift_to_U(h, hb.basis().col(i), tol));
    Eigen::MatrixXd gram(r, r);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) gram(i, j) = lifts[i].dot(h.omega * lifts[j]);
    }
    if (r > 0 && numeric_rank(gram, tol, h.omega.norm()) != r) out.fail(mb, "omega_Hbar degenerate on Hbar");
    const Eigen::MatrixXd cols = d_red.fiber_matrix(mb);
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      const Eigen::VectorXd xb = cols.col(c).head(nbar);
      const Eigen::VectorXd ab = cols.col(c).tail(nbar);
      const Eigen::VectorXd x = lift_to_U(h, xb, tol);
      const double scale = std::max({1.0, ab.norm(), x.norm() * h.omega.norm()});
      for (int i = 0; i < r; ++i) {
        const double lhs = ab.dot(hb.basis().col(i));
        const double rhs = x.dot(h.omega * lifts[i]);
        out.record(std::abs(lhs - rhs) / scale, mb, tol, "form part of D_red differs from omega_Hbar");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Noether

Subspace g_H_fiber(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  const int k = l.action.size();
  if (k == 0) return Subspace::zero(0, tol);
  if (model.beta.empty()) return Subspace::full(k, tol);
  const std::vector<JetList> xi = l.action.generator_jets(m);
  Eigen::MatrixXd B(model.beta.size(), k);
  double scale = 0.0;
  for (std::size_t j = 0; j < model.beta.size(); ++j) {
    const Eigen::VectorXd b = model.beta[j].values(m);
    scale = std::max(scale, b.norm());
    for (int g = 0; g < k; ++g) B(static_cast<Eigen::Index>(j), g) = b.dot(values(xi[g]));
  }
  const Eigen::MatrixXd K = null_space(B, tol, scale * max_norm(xi));
  return K.cols() ? Subspace(k, K, tol) : Subspace::zero(k, tol);
}

Eigen::VectorXd noether_one_form(const ConstraintPhase& c, const LiftedAction& l, const std::vector<ScalarField>& f,
                                 const Point& m) {
  const int k = l.action.size();
  if (static_cast<int>(f.size()) != k) throw DimensionError("noether_one_form: one coefficient per generator");
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m.size());
  for (int a = 0; a < k; ++a) {
    const Jet J = momentum_jet(c.embedding, l.base_generators, unit(k, a), m, c.q_dim);
    alpha += f[a](m) * Eigen::VectorXd(J.grad());
  }
  return alpha;
}

CheckOutcome noether_pair_in_D(const NonholonomicModel& model, const LiftedAction& l,
                               const std::vector<ScalarField>& f, const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  for (const Point& m : points) {
    const int n = static_cast<int>(m.size());
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < l.action.size(); ++a) xi += f[a](m) * l.action.generators[a].values(m);
    Eigen::VectorXd v(2 * n);
    v << xi, noether_one_form(model.phase, l, f, m);
    out.record(membership_residual(model.dirac, m, v), m, tol, "(xi, alpha_xi) is not a section of D");
  }
  return out;
}

double noether_residual(const NonholonomicModel& model, const LiftedAction& l, const ScalarField& H,
                        const std::vector<ScalarField>& f, const Point& m, double tol) {
  const int k = l.action.size();
  if (static_cast<int>(f.size()) != k) throw DimensionError("noether_residual: one coefficient per generator");
  const Jet h = H.jet(m);
  const Eigen::VectorXd dh = h.grad();
  for (int a = 0; a < k; ++a) {
    const Eigen::VectorXd xi = l.action.generators[a].values(m);
    if (std::abs(dh.dot(xi)) > tol * std::max(1.0, dh.norm() * xi.norm())) {
      throw InputError("Hamiltonian is not invariant under generator " + std::to_string(a + 1) + " at " +
                       format_point(m));
    }
  }
  const HamiltonianSolution sol = solve_implicit_hamiltonian(model.dirac, dh, m, tol);
  const Eigen::VectorXd& X = sol.X;
  Jet jsum = Jet::constant(0.0, static_cast<int>(m.size()));
  double correction = 0.0;
  for (int a = 0; a < k; ++a) {
    const Jet J = momentum_jet(model.phase.embedding, l.base_generators, unit(k, a), m, model.phase.q_dim);
    const Jet fa = f[a].jet(m);
    jsum += fa * J;
    correction += Eigen::VectorXd(fa.grad()).dot(X) * J.value();
  }
  return Eigen::VectorXd(jsum.grad()).dot(X) - correction;
}

ConservedVerdict conserved_criterion(const NonholonomicModel& model, const LiftedAction& l,
                                     const std::vector<double>& xi, const ScalarField& H,
                                     const std::vector<Point>& points, double tol) {
  const int k = l.action.size();
  if (static_cast<int>(xi.size()) != k) throw DimensionError("conserved_criterion: coefficient count");
  ConservedVerdict v;
  for (const Point& m : points) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.size());
    for (int a = 0; a < k; ++a) x += xi[a] * l.action.generators[a].values(m);
    const Subspace r = reaction_R(model, l, m, tol);
    double worst = 0.0;
    for (int i = 0; i < r.dim(); ++i) worst = std::max(worst, std::abs(r.basis().col(i).dot(x)));
    v.annihilation.record(x.norm() > 0.0 ? worst / x.norm() : 0.0, m, tol, "R does not annihilate xi_M");
  }
  v.criterion = v.annihilation.ok;
  if (v.criterion) {
    std::vector<ScalarField> f;
    for (int a = 0; a < k; ++a) f.push_back(ScalarField::constant(model.phase.m_chart, xi[a]));
    for (const Point& m : points) {
      v.noether.record(std::abs(noether_residual(model, l, H, f, m, tol)), m, tol,
                       "momentum of a criterion-satisfying generator drifts");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Optimal distribution

Subspace optimal_distribution_DG(const NonholonomicModel& model, const LiftedAction& l, const Point& m, double tol) {
  const LocalFrames f = local_frames(model, &l.action, m, tol);
  std::vector<JetList> all = f.U;
  all.insert(all.end(), f.xi.begin(), f.xi.end());
  return span(all, f.n, tol);
}

int horizontal_plus_vertical_rank(const NonholonomicModel& model, const LiftedAction& l,
                                  const std::vector<Point>& points, double tol) {
  int rank = -1;
  Point first;
  for (const Point& m : points) {
    const LocalFrames f = local_frames(model, &l.action, m, tol);
    std::vector<JetList> all = f.H;
    all.insert(all.end(), f.xi.begin(), f.xi.end());
    const int r = span(all, f.n, tol).dim();
    if (rank < 0) {
      rank = r;
      first = m;
    } else if (r != rank) {
      throw RankError("optimal_distribution", "dim(H + V) is " + std::to_string(rank) + " at " + format_point(first) +
                                                  " but " + std::to_string(r) + " at " + format_point(m));
    }
  }
  return rank;
}

CheckOutcome is_involutive_DG(const NonholonomicModel& model, const LiftedAction& l, const std::vector<Point>& points,
                              double tol) {
  CheckOutcome out;
  for (const Point& m : points) {
    const LocalFrames f = local_frames(model, &l.action, m, tol);
    std::vector<JetList> all = f.U;
    all.insert(all.end(), f.xi.begin(), f.xi.end());
    const Subspace dg = span(all, f.n, tol);
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        const Eigen::VectorXd br = values(jets::bracket(all[i], all[j]));
        const double scale = std::max(values(all[i]).norm(), values(all[j]).norm());
        out.record(dg.residual(br, scale), m, tol,
                   "bracket of spanning fields " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                       " leaves D_G");
      }
    }
  }
  return out;
}

CheckOutcome annihilates_DG(const NonholonomicModel& model, const LiftedAction& l, const ScalarField& f,
                            const std::vector<Point>& points, double tol) {
  CheckOutcome out;
  for (const Point& m : points) {
    const Eigen::VectorXd df = f.jet(m).grad();
    const Subspace dg = optimal_distribution_DG(model, l, m, tol);
    double worst = 0.0;
    for (int i = 0; i < dg.dim(); ++i) worst = std::max(worst, std::abs(df.dot(dg.basis().col(i))));
    out.record(df.norm() > 0.0 ? worst / df.norm() : 0.0, m, tol, "df does not vanish on D_G");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Leaves

DiracStructure leaf_reduce(const DiracStructure& d, const Leaf& leaf, double tol) {
  return reduce_dirac(restrict_to_level_set(d, leaf.level, tol), leaf.action, leaf.quotient, tol);
}

CheckOutcome leaf_form_agreement(const DiracStructure& d, const SymmetryAction& a, const Leaf& leaf,
                                 const DiracStructure& d_rho, const std::vector<Point>& reduced_points, double tol) {
  CheckOutcome out;
  for (const Point& xb : reduced_points) {
    const Point x = leaf.quotient.slice(xb);
    const Point m = leaf.level.embedding(x);
    const Eigen::MatrixXd E = leaf.level.embedding.jacobian(x);
    const Eigen::MatrixXd jp = leaf.quotient.projection.jacobian(x);
    const Eigen::MatrixXd w = induced_two_form(d_rho, xb);
    const SectionList s = d_cap_k_perp_sections(d, a, m, tol);
    std::vector<Eigen::VectorXd> ub, X, al;
    for (const SectionJets& sec : s) {
      X.push_back(values(sec.vec));
      al.push_back(values(sec.form));
      const Eigen::VectorXd u = lstsq(E, X.back());
      out.record((E * u - X.back()).norm() / std::max(1.0, X.back().norm()), xb, tol,
                 "D ∩ K-perp vector not tangent to the leaf");
      ub.push_back(jp * u);
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double lhs = ub[i].dot(w * ub[j]);
        const double rhs = al[i].dot(X[j]);
        out.record(std::abs(lhs - rhs) / std::max(1.0, al[i].norm() * X[j].norm()), xb, tol,
                   "leaf 2-form differs from the D ∩ K-perp pairing");
      }
    }
  }
  return out;
}

CheckOutcome reduced_bracket_identity(const DiracStructure& d, const Leaf& leaf, const DiracStructure& d_rho,
                                      const ScalarField& h, const ScalarField& k,
                                      const std::vector<Point>& reduced_points, double tol) {
  CheckOutcome out;
  const PointMap down = compose_maps(leaf.level.embedding, leaf.quotient.slice);
  const ScalarField hr = pullback(down, h);
  const ScalarField kr = pullback(down, k);
  for (const Point& xb : reduced_points) {
    const Point m = down(xb);
    const BracketValue full = dirac_poisson_bracket(d, h, k, m, tol);
    const BracketValue red = dirac_poisson_bracket(d_rho, hr, kr, xb, tol);
    if (!full.admissible || !red.admissible) {
      out.fail(xb, "bracket arguments not admissible");
      continue;
    }
    out.record(std::abs(full.value - red.value) / std::max(1.0, std::abs(full.value)), xb, tol,
               "reduced bracket differs from the full bracket");
  }
  return out;
}

}  // namespace dk
