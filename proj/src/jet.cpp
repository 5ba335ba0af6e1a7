#include "dirackit/jet.hpp"

#include "dirackit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dk {

namespace {

void check_dims(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

}  // namespace

Jet::Jet(double value, int dim, int order) : v_(value), order_(order) {
  if (dim < 0 || dim > kMaxDim) {
    throw DimensionError("jet dimension " + std::to_string(dim) + " outside [0, " +
                         std::to_string(kMaxDim) + "]");
  }
  g_.setZero(dim);
  h_.setZero(dim, dim);
}

Jet Jet::variable(double x, int index, int dim) {
  Jet j(x, dim);
  j.g_(index) = 1.0;
  return j;
}

const JVec& Jet::grad() const {
  if (order_ < 1) throw OrderError("gradient requested from an order-0 jet");
  return g_;
}

const JMat& Jet::hess() const {
  if (order_ < 2) throw OrderError("Hessian requested from a jet of order " + std::to_string(order_));
  return h_;
}

Jet& Jet::operator+=(const Jet& o) {
  check_dims(*this, o);
  v_ += o.v_;
  order_ = std::min(order_, o.order_);
  if (order_ >= 1) g_ += o.g_;
  if (order_ >= 2) h_ += o.h_;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_dims(*this, o);
  v_ -= o.v_;
  order_ = std::min(order_, o.order_);
  if (order_ >= 1) g_ -= o.g_;
  if (order_ >= 2) h_ -= o.h_;
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  check_dims(*this, o);
  order_ = std::min(order_, o.order_);
  if (order_ >= 2) {
    h_ = o.v_ * h_ + v_ * o.h_ + g_ * o.g_.transpose() + o.g_ * g_.transpose();
  }
  if (order_ >= 1) g_ = o.v_ * g_ + v_ * o.g_;
  v_ *= o.v_;
  return *this;
}

Jet& Jet::operator*=(double c) {
  v_ *= c;
  g_ *= c;
  h_ *= c;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) { return *this *= (1.0 / o); }

Jet operator-(const Jet& a) {
  Jet r = a;
  r.v_ = -a.v_;
  r.g_ = -a.g_;
  r.h_ = -a.h_;
  return r;
}

Jet apply(const Jet& a, double f, double f1, double f2) {
  Jet r = a;
  r.v_ = f;
  if (a.order_ >= 2) r.h_ = f1 * a.h_ + f2 * (a.g_ * a.g_.transpose());
  if (a.order_ >= 1) r.g_ = f1 * a.g_;
  return r;
}

Jet operator/(double c, const Jet& a) {
  const double v = a.value();
  if (v == 0.0) throw Error("division by a jet with zero value");
  const double inv = 1.0 / v;
  return apply(a, c * inv, -c * inv * inv, 2.0 * c * inv * inv * inv);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return apply(a, s, c, -s);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  return apply(a, c, -s, -c);
}

Jet sqrt(const Jet& a) {
  const double v = a.value();
  if (v <= 0.0) throw Error("sqrt of a jet with nonpositive value");
  const double r = std::sqrt(v);
  return apply(a, r, 0.5 / r, -0.25 / (r * v));
}

Jet pow(const Jet& a, int k) {
  if (k == 0) return Jet(1.0, a.dim(), a.order());
  if (k < 0) return 1.0 / pow(a, -k);
  const double v = a.value();
  const double f = std::pow(v, k);
  const double f1 = k * std::pow(v, k - 1);
  const double f2 = k >= 2 ? k * (k - 1) * std::pow(v, k - 2) : 0.0;
  return apply(a, f, f1, f2);
}

Jet derivative(const Jet& a, int i) {
  if (a.order_ < 1) throw OrderError("cannot differentiate an order-0 jet");
  if (i < 0 || i >= a.dim()) throw DimensionError("derivative index out of range");
  Jet r(a.g_(i), a.dim(), a.order_ - 1);
  if (r.order_ >= 1) r.g_ = a.h_.col(i);
  return r;
}

Jet compose(const Jet& outer, const std::vector<Jet>& inner) {
  if (static_cast<int>(inner.size()) != outer.dim()) {
    throw DimensionError("compose: outer jet has dimension " + std::to_string(outer.dim()) +
                         " but " + std::to_string(inner.size()) + " inner jets were given");
  }
  const int src = inner.empty() ? 0 : inner.front().dim();
  int order = outer.order_;
  for (const Jet& j : inner) {
    if (j.dim() != src) throw DimensionError("compose: inner jets disagree in dimension");
    order = std::min(order, j.order_);
  }
  Jet r(outer.v_, src, order);
  if (order >= 1) {
    for (std::size_t k = 0; k < inner.size(); ++k) r.g_ += outer.g_(k) * inner[k].g_;
  }
  if (order >= 2) {
    const int m = outer.dim();
    for (int k = 0; k < m; ++k) {
      r.h_ += outer.g_(k) * inner[k].h_;
      for (int l = 0; l < m; ++l) {
        const double c = outer.h_(k, l);
        if (c != 0.0) r.h_ += c * inner[k].g_ * inner[l].g_.transpose();
      }
    }
    r.h_ = 0.5 * (r.h_ + r.h_.transpose()).eval();
  }
  return r;
}

Jet truncate(const Jet& a, int order) {
  Jet r = a;
  r.order_ = std::min(a.order_, order);
  if (r.order_ < 2) r.h_.setZero();
  if (r.order_ < 1) r.g_.setZero();
  return r;
}

int min_order(const JetList& jets) {
  int o = 2;
  for (const Jet& j : jets) o = std::min(o, j.order());
  return o;
}

JetList coordinate_jets(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  JetList out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(Jet::variable(x(i), i, n));
  return out;
}

Eigen::VectorXd values(const JetList& jets) {
  Eigen::VectorXd v(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) v(static_cast<Eigen::Index>(i)) = jets[i].value();
  return v;
}

}  // namespace dk
