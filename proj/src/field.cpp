#include "dirackit/field.hpp"

#include "dirackit/errors.hpp"

namespace dk {

Field::Field(ChartPtr chart, int size, FieldFn fn)
    : chart_(std::move(chart)), size_(size), fn_(std::make_shared<const FieldFn>(std::move(fn))) {
  if (!chart_) throw InputError("field without a chart");
}

JetList Field::eval(const Point& x) const {
  if (x.size() != chart_->dim()) {
    throw DimensionError("point of dimension " + std::to_string(x.size()) + " on chart '" +
                         chart_->name() + "' of dimension " + std::to_string(chart_->dim()));
  }
  JetList out = (*fn_)(x);
  if (static_cast<int>(out.size()) != size_) {
    throw DimensionError("field on chart '" + chart_->name() + "' produced " +
                         std::to_string(out.size()) + " components, expected " +
                         std::to_string(size_));
  }
  return out;
}

Eigen::VectorXd Field::values(const Point& x) const { return dk::values(eval(x)); }

JetList Field::eval_composed(const JetList& inner) const {
  JetList local = eval(dk::values(inner));
  for (Jet& j : local) j = compose(j, inner);
  return local;
}

std::vector<Expression> parse_all(const ChartPtr& chart, const std::vector<std::string>& src,
                                  const ParamMap& params) {
  std::vector<Expression> out;
  out.reserve(src.size());
  for (const std::string& s : src) out.push_back(Expression::parse(s, chart->coords(), params));
  return out;
}

Field expression_field(const ChartPtr& chart, const std::vector<Expression>& exprs) {
  for (const Expression& e : exprs) {
    if (e.variables() != chart->coords()) {
      throw ChartMismatch("expression variables do not match chart '" + chart->name() + "'");
    }
  }
  const int n = chart->dim();
  return Field(chart, static_cast<int>(exprs.size()), [exprs, n](const Point& x) {
    const JetList vars = coordinate_jets(x);
    JetList out;
    out.reserve(exprs.size());
    for (const Expression& e : exprs) {
      out.push_back(e.is_zero_literal() ? Jet::constant(0.0, n) : e.eval(vars, n));
    }
    return out;
  });
}

namespace {

Field constant_components(const ChartPtr& chart, Eigen::VectorXd comps) {
  const int n = chart->dim();
  return Field(chart, static_cast<int>(comps.size()), [comps, n](const Point&) {
    JetList out;
    out.reserve(comps.size());
    for (Eigen::Index i = 0; i < comps.size(); ++i) out.push_back(Jet::constant(comps(i), n));
    return out;
  });
}

void require_size(const Field& f, int size, const char* what) {
  if (f.size() != size) {
    throw DimensionError(std::string(what) + ": field has " + std::to_string(f.size()) +
                         " components, expected " + std::to_string(size));
  }
}

ScalarField pick(const Field& f, int i) {
  return ScalarField(Field(f.chart(), 1, [f, i](const Point& x) { return JetList{f.eval(x)[i]}; }));
}

Field wedge_field(const ChartPtr& chart, const std::vector<WedgeTerm>& terms, const ParamMap& params) {
  const int n = chart->dim();
  std::vector<std::string> src(static_cast<std::size_t>(n) * n);
  auto append = [](std::string& slot, const std::string& term) {
    slot = slot.empty() ? term : slot + " + " + term;
  };
  for (const WedgeTerm& t : terms) {
    const int a = chart->index_of(t.a);
    const int b = chart->index_of(t.b);
    if (a < 0 || b < 0) {
      throw InputError("wedge term " + t.a + "^" + t.b + " names an unknown coordinate of chart '" +
                       chart->name() + "'");
    }
    if (a == b) continue;
    append(src[a * n + b], "(" + t.coeff + ")");
    append(src[b * n + a], "-(" + t.coeff + ")");
  }
  for (std::string& s : src) {
    if (s.empty()) s = "0";
  }
  return expression_field(chart, parse_all(chart, src, params));
}

Eigen::MatrixXd as_matrix(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  }
  return m;
}

}  // namespace

ScalarField::ScalarField(Field f) : Field(std::move(f)) { require_size(*this, 1, "ScalarField"); }

ScalarField ScalarField::constant(const ChartPtr& chart, double c) {
  return ScalarField(constant_components(chart, Eigen::VectorXd::Constant(1, c)));
}

ScalarField ScalarField::coordinate(const ChartPtr& chart, int i) {
  const int n = chart->dim();
  return ScalarField(Field(chart, 1, [i, n](const Point& x) { return JetList{Jet::variable(x(i), i, n)}; }));
}

ScalarField ScalarField::parse(const ChartPtr& chart, const std::string& src, const ParamMap& params) {
  return ScalarField(expression_field(chart, parse_all(chart, {src}, params)));
}

ScalarField ScalarField::from_expression(const ChartPtr& chart, const Expression& e) {
  return ScalarField(expression_field(chart, {e}));
}

ScalarField ScalarField::from_function(const ChartPtr& chart, std::function<Jet(const Point&)> fn) {
  return ScalarField(Field(chart, 1, [fn = std::move(fn)](const Point& x) { return JetList{fn(x)}; }));
}

VectorField::VectorField(Field f) : Field(std::move(f)) { require_size(*this, dim(), "VectorField"); }

VectorField VectorField::zero(const ChartPtr& chart) {
  return VectorField(constant_components(chart, Eigen::VectorXd::Zero(chart->dim())));
}

VectorField VectorField::coordinate(const ChartPtr& chart, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(chart->dim());
  e(i) = 1.0;
  return VectorField(constant_components(chart, e));
}

VectorField VectorField::coordinate(const ChartPtr& chart, const std::string& name) {
  const int i = chart->index_of(name);
  if (i < 0) throw InputError("unknown coordinate '" + name + "' on chart '" + chart->name() + "'");
  return coordinate(chart, i);
}

VectorField VectorField::parse(const ChartPtr& chart, const std::vector<std::string>& comps,
                               const ParamMap& params) {
  return VectorField(expression_field(chart, parse_all(chart, comps, params)));
}

ScalarField VectorField::component(int i) const { return pick(*this, i); }

OneForm::OneForm(Field f) : Field(std::move(f)) { require_size(*this, dim(), "OneForm"); }

OneForm OneForm::zero(const ChartPtr& chart) {
  return OneForm(constant_components(chart, Eigen::VectorXd::Zero(chart->dim())));
}

OneForm OneForm::coordinate(const ChartPtr& chart, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(chart->dim());
  e(i) = 1.0;
  return OneForm(constant_components(chart, e));
}

OneForm OneForm::parse(const ChartPtr& chart, const std::vector<std::string>& comps,
                       const ParamMap& params) {
  return OneForm(expression_field(chart, parse_all(chart, comps, params)));
}

ScalarField OneForm::component(int i) const { return pick(*this, i); }

TwoForm::TwoForm(Field f) : Field(std::move(f)) { require_size(*this, dim() * dim(), "TwoForm"); }

TwoForm TwoForm::zero(const ChartPtr& chart) {
  return TwoForm(constant_components(chart, Eigen::VectorXd::Zero(chart->dim() * chart->dim())));
}

TwoForm TwoForm::parse(const ChartPtr& chart, const std::vector<std::vector<std::string>>& matrix,
                       const ParamMap& params) {
  const int n = chart->dim();
  if (static_cast<int>(matrix.size()) != n) throw DimensionError("2-form matrix has wrong row count");
  std::vector<std::string> flat;
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != n) throw DimensionError("2-form matrix has wrong column count");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return TwoForm(expression_field(chart, parse_all(chart, flat, params)));
}

TwoForm TwoForm::from_wedges(const ChartPtr& chart, const std::vector<WedgeTerm>& terms,
                             const ParamMap& params) {
  return TwoForm(wedge_field(chart, terms, params));
}

ScalarField TwoForm::component(int i, int j) const { return pick(*this, i * dim() + j); }

Eigen::MatrixXd TwoForm::matrix(const Point& x) const { return as_matrix(values(x), dim()); }

Bivector::Bivector(Field f) : Field(std::move(f)) { require_size(*this, dim() * dim(), "Bivector"); }

Bivector Bivector::zero(const ChartPtr& chart) {
  return Bivector(constant_components(chart, Eigen::VectorXd::Zero(chart->dim() * chart->dim())));
}

Bivector Bivector::from_wedges(const ChartPtr& chart, const std::vector<WedgeTerm>& terms,
                               const ParamMap& params) {
  return Bivector(wedge_field(chart, terms, params));
}

Eigen::MatrixXd Bivector::matrix(const Point& x) const { return as_matrix(values(x), dim()); }

PointMap::PointMap(ChartPtr source, ChartPtr target, Field components)
    : source_(std::move(source)), target_(std::move(target)), comps_(std::move(components)) {
  require_same_chart(source_, comps_.chart(), "PointMap");
  if (comps_.size() != target_->dim()) {
    throw DimensionError("map into '" + target_->name() + "' needs " +
                         std::to_string(target_->dim()) + " components, got " +
                         std::to_string(comps_.size()));
  }
}

PointMap PointMap::parse(const ChartPtr& source, const ChartPtr& target,
                         const std::vector<std::string>& comps, const ParamMap& params) {
  return PointMap(source, target, expression_field(source, parse_all(source, comps, params)));
}

PointMap PointMap::identity(const ChartPtr& chart) {
  return PointMap(chart, chart, Field(chart, chart->dim(), [](const Point& x) { return coordinate_jets(x); }));
}

Eigen::MatrixXd PointMap::jacobian(const Point& x) const {
  const JetList j = eval(x);
  Eigen::MatrixXd out(j.size(), source_->dim());
  for (std::size_t r = 0; r < j.size(); ++r) {
    for (int c = 0; c < source_->dim(); ++c) out(static_cast<Eigen::Index>(r), c) = j[r].d(c);
  }
  return out;
}

}  // namespace dk
