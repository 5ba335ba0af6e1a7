#include "dirackit/subspace.hpp"

#include "dirackit/errors.hpp"

#include <algorithm>
#include <atomic>
#include <string>

namespace dk {

namespace {

std::atomic<double> g_default_tol{1e-9};

void require_ambient(const Subspace& a, const Subspace& b, const char* what) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw DimensionError(std::string(what) + ": ambient dimensions " + std::to_string(a.ambient_dim()) +
                         " and " + std::to_string(b.ambient_dim()));
  }
}

}  // namespace

double default_tolerance() { return g_default_tol.load(); }

void set_default_tolerance(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw InputError("tolerance must lie in (0, 1)");
  g_default_tol.store(tol);
}

Subspace::Subspace(int ambient_dim, const Eigen::MatrixXd& cols, double tol)
    : n_(ambient_dim), tol_(tol) {
  if (cols.cols() > 0 && cols.rows() != ambient_dim) {
    throw DimensionError("spanning vectors of length " + std::to_string(cols.rows()) +
                         " for ambient dimension " + std::to_string(ambient_dim));
  }
  if (cols.cols() == 0 || cols.isZero(0.0)) {
    basis_.resize(n_, 0);
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol_ * s(0)) ++r;
  }
  basis_ = svd.matrixU().leftCols(r);
}

Subspace Subspace::zero(int n, double tol) { return Subspace(n, Eigen::MatrixXd(n, 0), tol); }

Subspace Subspace::full(int n, double tol) { return Subspace(n, Eigen::MatrixXd::Identity(n, n), tol); }

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& v) const {
  if (v.size() != n_) throw DimensionError("vector length does not match ambient dimension");
  if (dim() == 0) return Eigen::VectorXd::Zero(n_);
  return basis_ * (basis_.transpose() * v);
}

double Subspace::distance(const Eigen::VectorXd& v) const { return (v - project(v)).norm(); }

double Subspace::residual(const Eigen::VectorXd& v, double scale) const {
  const double ref = std::max(v.norm(), scale);
  if (ref == 0.0) return 0.0;
  return distance(v) / ref;
}

bool Subspace::contains(const Eigen::VectorXd& v, double scale) const { return residual(v, scale) <= tol_; }

bool Subspace::contains(const Subspace& other) const {
  if (other.ambient_dim() != n_) throw DimensionError("containment across ambient dimensions");
  for (int i = 0; i < other.dim(); ++i) {
    if (!contains(Eigen::VectorXd(other.basis().col(i)))) return false;
  }
  return true;
}

Subspace sum(const Subspace& a, const Subspace& b) {
  require_ambient(a, b, "sum");
  Eigen::MatrixXd m(a.ambient_dim(), a.dim() + b.dim());
  m << a.basis(), b.basis();
  return Subspace(a.ambient_dim(), m, std::max(a.tol(), b.tol()));
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double tol, double scale) {
  const Eigen::Index c = m.cols();
  if (c == 0) return Eigen::MatrixXd(0, 0);
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(c, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double ref = std::max(s(0), scale);
  Eigen::Index r = 0;
  if (ref > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > tol * ref) ++r;
    }
  }
  return svd.matrixV().rightCols(c - r);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  require_ambient(a, b, "intersect");
  const double tol = std::max(a.tol(), b.tol());
  const int n = a.ambient_dim();
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(n, tol);
  Eigen::MatrixXd m(n, a.dim() + b.dim());
  m << a.basis(), -b.basis();
  // Singular values of [Qa, -Qb] lie in [0, sqrt 2]; use 1 as the scale so a
  // pair of nearly parallel planes is not mistaken for a shared line.
  const Eigen::MatrixXd k = null_space(m, tol, 1.0);
  if (k.cols() == 0) return Subspace::zero(n, tol);
  return Subspace(n, a.basis() * k.topRows(a.dim()), tol);
}

Subspace annihilator(const Subspace& a) {
  const int n = a.ambient_dim();
  if (a.dim() == 0) return Subspace::full(n, a.tol());
  if (a.dim() == n) return Subspace::zero(n, a.tol());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.basis(), Eigen::ComputeFullU);
  return Subspace(n, svd.matrixU().rightCols(n - a.dim()), a.tol());
}

Subspace orthogonal_wrt_form(const Subspace& a, const Eigen::MatrixXd& omega, const Subspace& within) {
  require_ambient(a, within, "orthogonal_wrt_form");
  const int n = a.ambient_dim();
  if (omega.rows() != n || omega.cols() != n) throw DimensionError("orthogonal_wrt_form: form shape");
  if (a.dim() == 0 || within.dim() == 0) return within;
  const Eigen::MatrixXd m = a.basis().transpose() * omega.transpose() * within.basis();
  const double scale = omega.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(omega).singularValues()(0) : 0.0;
  const Eigen::MatrixXd k = null_space(m, within.tol(), scale);
  if (k.cols() == 0) return Subspace::zero(n, within.tol());
  return Subspace(n, within.basis() * k, within.tol());
}

bool equals(const Subspace& a, const Subspace& b) {
  require_ambient(a, b, "equals");
  return a.dim() == b.dim() && sum(a, b).dim() == a.dim();
}

double containment_residual(const Subspace& a, const Eigen::MatrixXd& columns) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < columns.cols(); ++i) {
    worst = std::max(worst, a.residual(columns.col(i)));
  }
  return worst;
}

}  // namespace dk
