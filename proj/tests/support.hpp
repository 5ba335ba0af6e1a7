#pragma once

#include "dirackit/field.hpp"

#include <Eigen/Dense>

#include <functional>

namespace dk::test {

/// Central difference of a scalar function along coordinate i.
inline double fd1(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x, int i,
                  double h = 1e-5) {
  Eigen::VectorXd a = x, b = x;
  a(i) += h;
  b(i) -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

/// Central second difference d_i d_j f.
inline double fd2(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x, int i, int j,
                  double h = 1e-4) {
  auto g = [&](const Eigen::VectorXd& y) { return fd1(f, y, j, h); };
  return fd1(g, x, i, h);
}

/// Numerical Jacobian of a field's component values.
inline Eigen::MatrixXd fd_jacobian(const Field& f, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::MatrixXd j(f.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a(i) += h;
    b(i) -= h;
    j.col(i) = (f.values(a) - f.values(b)) / (2.0 * h);
  }
  return j;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

}  // namespace dk::test
