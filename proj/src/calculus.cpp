#include "dirackit/calculus.hpp"

#include "dirackit/errors.hpp"

namespace dk {

namespace jets {

namespace {

int dim_of(const JetList& v) {
  if (v.empty()) throw DimensionError("empty component list");
  return v.front().dim();
}

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

Jet pair(const JetList& alpha, const JetList& X) {
  require(alpha.size() == X.size(), "pair: size mismatch");
  Jet s = Jet::constant(0.0, dim_of(X));
  for (std::size_t i = 0; i < X.size(); ++i) s += alpha[i] * X[i];
  return s;
}

JetList bracket(const JetList& X, const JetList& Y) {
  require(X.size() == Y.size(), "bracket: size mismatch");
  const int n = static_cast<int>(X.size());
  JetList out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Jet s = Jet::constant(0.0, dim_of(X));
    for (int j = 0; j < n; ++j) {
      s += X[j] * derivative(Y[i], j);
      s -= Y[j] * derivative(X[i], j);
    }
    out.push_back(std::move(s));
  }
  return out;
}

JetList exterior_derivative(const JetList& alpha) {
  const int n = static_cast<int>(alpha.size());
  require(dim_of(alpha) == n, "exterior_derivative: 1-form size must equal chart dimension");
  JetList out(static_cast<std::size_t>(n) * n, Jet::constant(0.0, n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Jet v = derivative(alpha[j], i) - derivative(alpha[i], j);
      out[j * n + i] = -v;
      out[i * n + j] = std::move(v);
    }
  }
  // Diagonal entries carry the order of the rest.
  const int order = std::max(0, min_order(alpha) - 1);
  for (int i = 0; i < n; ++i) out[i * n + i] = Jet(0.0, n, order);
  return out;
}

JetList differential(const Jet& f) {
  JetList out;
  out.reserve(f.dim());
  for (int i = 0; i < f.dim(); ++i) out.push_back(derivative(f, i));
  return out;
}

JetList interior(const JetList& X, const JetList& omega) {
  const int n = static_cast<int>(X.size());
  require(static_cast<int>(omega.size()) == n * n, "interior: size mismatch");
  JetList out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    Jet s = Jet::constant(0.0, dim_of(X));
    for (int i = 0; i < n; ++i) s += X[i] * omega[i * n + j];
    out.push_back(std::move(s));
  }
  return out;
}

Jet two_form_apply(const JetList& omega, const JetList& X, const JetList& Y) {
  return pair(interior(X, omega), Y);
}

JetList lie_derivative(const JetList& X, const JetList& alpha) {
  JetList out = interior(X, exterior_derivative(alpha));
  const JetList d = differential(pair(alpha, X));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  return out;
}

double d_two_form(const JetList& omega, const JetList& X, const JetList& Y, const JetList& Z) {
  auto directional = [](const JetList& V, const Jet& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) s += V[i].value() * f.d(static_cast<int>(i));
    return s;
  };
  auto w = [&](const JetList& A, const JetList& B) { return two_form_apply(omega, A, B).value(); };
  return directional(X, two_form_apply(omega, Y, Z)) - directional(Y, two_form_apply(omega, X, Z)) +
         directional(Z, two_form_apply(omega, X, Y)) - w(bracket(X, Y), Z) + w(bracket(X, Z), Y) -
         w(bracket(Y, Z), X);
}

}  // namespace jets

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  require_same_chart(X.chart(), Y.chart(), "lie_bracket");
  return VectorField(Field(X.chart(), X.dim(), [X, Y](const Point& m) {
    return jets::bracket(X.eval(m), Y.eval(m));
  }));
}

TwoForm exterior_derivative_one_form(const OneForm& alpha) {
  return TwoForm(Field(alpha.chart(), alpha.dim() * alpha.dim(),
                       [alpha](const Point& m) { return jets::exterior_derivative(alpha.eval(m)); }));
}

OneForm differential(const ScalarField& f) {
  return OneForm(Field(f.chart(), f.dim(), [f](const Point& m) { return jets::differential(f.jet(m)); }));
}

double d_two_form_contract(const TwoForm& omega, const VectorField& X, const VectorField& Y,
                           const VectorField& Z, const Point& m) {
  require_same_chart(omega.chart(), X.chart(), "d_two_form_contract");
  require_same_chart(omega.chart(), Y.chart(), "d_two_form_contract");
  require_same_chart(omega.chart(), Z.chart(), "d_two_form_contract");
  return jets::d_two_form(omega.eval(m), X.eval(m), Y.eval(m), Z.eval(m));
}

OneForm lie_derivative_one_form(const VectorField& X, const OneForm& alpha) {
  require_same_chart(X.chart(), alpha.chart(), "lie_derivative_one_form");
  return OneForm(Field(X.chart(), X.dim(), [X, alpha](const Point& m) {
    return jets::lie_derivative(X.eval(m), alpha.eval(m));
  }));
}

OneForm interior_product(const VectorField& X, const TwoForm& omega) {
  require_same_chart(X.chart(), omega.chart(), "interior_product");
  return OneForm(Field(X.chart(), X.dim(), [X, omega](const Point& m) {
    return jets::interior(X.eval(m), omega.eval(m));
  }));
}

ScalarField pairing(const OneForm& alpha, const VectorField& X) {
  require_same_chart(X.chart(), alpha.chart(), "pairing");
  return ScalarField(Field(X.chart(), 1, [X, alpha](const Point& m) {
    return JetList{jets::pair(alpha.eval(m), X.eval(m))};
  }));
}

OneForm pullback(const PointMap& map, const OneForm& alpha) {
  require_same_chart(map.target(), alpha.chart(), "pullback");
  const int n = map.source()->dim();
  return OneForm(Field(map.source(), n, [map, alpha, n](const Point& x) {
    const JetList phi = map.eval(x);
    const JetList a = alpha.eval_composed(phi);
    JetList out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
      Jet s = Jet::constant(0.0, n);
      for (std::size_t i = 0; i < phi.size(); ++i) s += a[i] * derivative(phi[i], k);
      out.push_back(std::move(s));
    }
    return out;
  }));
}

TwoForm pullback(const PointMap& map, const TwoForm& omega) {
  require_same_chart(map.target(), omega.chart(), "pullback");
  const int n = map.source()->dim();
  const int t = map.target()->dim();
  return TwoForm(Field(map.source(), n * n, [map, omega, n, t](const Point& x) {
    const JetList phi = map.eval(x);
    const JetList w = omega.eval_composed(phi);
    std::vector<JetList> dphi(t);
    for (int i = 0; i < t; ++i) {
      for (int k = 0; k < n; ++k) dphi[i].push_back(derivative(phi[i], k));
    }
    JetList out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        Jet s = Jet::constant(0.0, n);
        for (int i = 0; i < t; ++i) {
          for (int j = 0; j < t; ++j) {
            s += w[i * t + j] * dphi[i][a] * dphi[j][b];
          }
        }
        out.push_back(std::move(s));
      }
    }
    return out;
  }));
}

ScalarField pullback(const PointMap& map, const ScalarField& f) {
  require_same_chart(map.target(), f.chart(), "pullback");
  return ScalarField(Field(map.source(), 1, [map, f](const Point& x) {
    return f.eval_composed(map.eval(x));
  }));
}

TwoForm canonical_two_form(const ChartPtr& chart) {
  const int n = chart->dim();
  if (n % 2 != 0) throw DimensionError("canonical form needs an even-dimensional (q, p) chart");
  const int d = n / 2;
  return TwoForm(Field(chart, n * n, [n, d](const Point&) {
    JetList out(static_cast<std::size_t>(n) * n, Jet::constant(0.0, n));
    for (int i = 0; i < d; ++i) {
      out[i * n + (d + i)] = Jet::constant(1.0, n);
      out[(d + i) * n + i] = Jet::constant(-1.0, n);
    }
    return out;
  }));
}

}  // namespace dk
