#pragma once

#include "dirackit/chart.hpp"
#include "dirackit/expression.hpp"
#include "dirackit/jet.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace dk {

using FieldFn = std::function<JetList(const Point&)>;

/**
 * A jet-valued function on a chart with a fixed number of components.
 *
 * Vector fields, 1-forms and 2-forms are thin typed views over this: their
 * components are coefficients in the coordinate (co)frame, a 2-form stores
 * its n x n matrix row-major.  Evaluation is pure and thread-safe.
 */
class Field {
 public:
  Field() = default;
  Field(ChartPtr chart, int size, FieldFn fn);

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }
  int size() const { return size_; }

  JetList eval(const Point& x) const;
  Eigen::VectorXd values(const Point& x) const;

  /// Jets of this field composed with a map whose component jets are `inner`
  /// (evaluated at the point values(inner) of this field's chart).
  JetList eval_composed(const JetList& inner) const;

 protected:
  ChartPtr chart_;
  int size_ = 0;
  std::shared_ptr<const FieldFn> fn_;
};

/// Field whose components are parsed expressions in the chart coordinates.
Field expression_field(const ChartPtr& chart, const std::vector<Expression>& exprs);
std::vector<Expression> parse_all(const ChartPtr& chart, const std::vector<std::string>& src,
                                  const ParamMap& params);

class ScalarField : public Field {
 public:
  ScalarField() = default;
  explicit ScalarField(Field f);

  static ScalarField constant(const ChartPtr& chart, double c);
  static ScalarField coordinate(const ChartPtr& chart, int i);
  static ScalarField parse(const ChartPtr& chart, const std::string& src, const ParamMap& params = {});
  static ScalarField from_expression(const ChartPtr& chart, const Expression& e);
  static ScalarField from_function(const ChartPtr& chart, std::function<Jet(const Point&)> fn);

  Jet jet(const Point& x) const { return eval(x).front(); }
  double operator()(const Point& x) const { return jet(x).value(); }
};

class VectorField : public Field {
 public:
  VectorField() = default;
  explicit VectorField(Field f);

  static VectorField zero(const ChartPtr& chart);
  static VectorField coordinate(const ChartPtr& chart, int i);  ///< the frame field d/dx^i
  static VectorField coordinate(const ChartPtr& chart, const std::string& name);
  static VectorField parse(const ChartPtr& chart, const std::vector<std::string>& comps,
                           const ParamMap& params = {});

  ScalarField component(int i) const;
};

class OneForm : public Field {
 public:
  OneForm() = default;
  explicit OneForm(Field f);

  static OneForm zero(const ChartPtr& chart);
  static OneForm coordinate(const ChartPtr& chart, int i);  ///< dx^i
  static OneForm parse(const ChartPtr& chart, const std::vector<std::string>& comps,
                       const ParamMap& params = {});

  ScalarField component(int i) const;
};

/// Coefficient of one wedge term c(x) dx^a ^ dx^b (or d_a ^ d_b for bivectors).
struct WedgeTerm {
  std::string a;
  std::string b;
  std::string coeff;
};

class TwoForm : public Field {
 public:
  TwoForm() = default;
  explicit TwoForm(Field f);

  static TwoForm zero(const ChartPtr& chart);
  static TwoForm parse(const ChartPtr& chart, const std::vector<std::vector<std::string>>& matrix,
                       const ParamMap& params = {});
  /// Sum of wedge terms; dx^a ^ dx^b contributes +c at (a,b) and -c at (b,a).
  static TwoForm from_wedges(const ChartPtr& chart, const std::vector<WedgeTerm>& terms,
                             const ParamMap& params = {});

  ScalarField component(int i, int j) const;
  Eigen::MatrixXd matrix(const Point& x) const;
};

/// Contravariant antisymmetric 2-tensor Pi, stored like TwoForm.
class Bivector : public Field {
 public:
  Bivector() = default;
  explicit Bivector(Field f);

  static Bivector zero(const ChartPtr& chart);
  static Bivector from_wedges(const ChartPtr& chart, const std::vector<WedgeTerm>& terms,
                              const ParamMap& params = {});
  Eigen::MatrixXd matrix(const Point& x) const;
};

/**
 * Smooth map between charts given by component jets (embeddings i: M -> T*Q,
 * quotient maps, slices, leaf embeddings).
 */
class PointMap {
 public:
  PointMap() = default;
  PointMap(ChartPtr source, ChartPtr target, Field components);

  static PointMap parse(const ChartPtr& source, const ChartPtr& target,
                        const std::vector<std::string>& comps, const ParamMap& params = {});
  static PointMap identity(const ChartPtr& chart);

  const ChartPtr& source() const { return source_; }
  const ChartPtr& target() const { return target_; }
  const Field& components() const { return comps_; }

  JetList eval(const Point& x) const { return comps_.eval(x); }
  Point operator()(const Point& x) const { return comps_.values(x); }
  Eigen::MatrixXd jacobian(const Point& x) const;

 private:
  ChartPtr source_;
  ChartPtr target_;
  Field comps_;
};

}  // namespace dk
