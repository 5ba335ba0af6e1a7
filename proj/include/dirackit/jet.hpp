#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dk {

/// Largest chart dimension supported by the fixed-capacity jet storage.
inline constexpr int kMaxDim = 10;

using JVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using JMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/**
 * Truncated second-order Taylor jet of a scalar function at a point.
 *
 * A jet carries the value, the gradient and the Hessian with respect to the
 * chart coordinates.  `order()` records how much of that is meaningful:
 * differentiating a jet (see `derivative`) lowers the order by one, and
 * every arithmetic result has the minimum order of its operands.
 */
class Jet {
 public:
  Jet() : Jet(0.0, 0) {}
  Jet(double value, int dim, int order = 2);

  static Jet constant(double c, int dim) { return Jet(c, dim); }
  static Jet variable(double x, int index, int dim);

  double value() const { return v_; }
  int dim() const { return static_cast<int>(g_.size()); }
  int order() const { return order_; }

  const JVec& grad() const;
  const JMat& hess() const;

  /// Partial derivative with respect to coordinate i, as a jet of order-1.
  double d(int i) const { return grad()(i); }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double c) { v_ += c; return *this; }
  Jet& operator-=(double c) { v_ -= c; return *this; }
  Jet& operator*=(double c);

  friend Jet operator-(const Jet& a);
  friend Jet apply(const Jet& a, double f, double f1, double f2);
  friend Jet derivative(const Jet& a, int i);
  friend Jet compose(const Jet& outer, const std::vector<Jet>& inner);
  friend Jet truncate(const Jet& a, int order);

 private:
  double v_;
  JVec g_;
  JMat h_;
  int order_;
};

using JetList = std::vector<Jet>;

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, double c) { return a += c; }
inline Jet operator+(double c, Jet a) { return a += c; }
inline Jet operator-(Jet a, double c) { return a -= c; }
inline Jet operator-(double c, const Jet& a) { return -a + c; }
inline Jet operator*(Jet a, double c) { return a *= c; }
inline Jet operator*(double c, Jet a) { return a *= c; }
inline Jet operator/(Jet a, double c) { return a *= 1.0 / c; }
Jet operator/(double c, const Jet& a);

/// Chain rule for a scalar function with f(a), f'(a), f''(a) supplied.
Jet apply(const Jet& a, double f, double f1, double f2);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, int k);

/// Jet of the partial derivative along coordinate i (order drops by one).
Jet derivative(const Jet& a, int i);

/**
 * Jet of `outer` composed with a map whose components have the jets `inner`.
 * `outer` is a jet with respect to the target coordinates of that map;
 * the result is a jet with respect to the source coordinates.
 */
Jet compose(const Jet& outer, const std::vector<Jet>& inner);

/// The same jet reported at a lower order.
Jet truncate(const Jet& a, int order);

/// Minimum order over a list (2 for an empty list).
int min_order(const JetList& jets);

/// Seed jets of the coordinate functions at point x.
JetList coordinate_jets(const Eigen::VectorXd& x);

Eigen::VectorXd values(const JetList& jets);

}  // namespace dk
