#pragma once

#include <Eigen/Dense>

namespace dk {

/// Relative singular-value cutoff used when no tolerance is given.
double default_tolerance();
/// Changes the process-wide default cutoff (affects subsequently built objects).
void set_default_tolerance(double tol);

/**
 * Linear subspace of R^n held as an orthonormal basis.
 *
 * The rank is the number of singular values of the spanning columns above
 * tol * (largest singular value); zero columns never raise it.
 */
class Subspace {
 public:
  Subspace() = default;
  Subspace(int ambient_dim, const Eigen::MatrixXd& spanning_columns, double tol = default_tolerance());

  static Subspace zero(int n, double tol = default_tolerance());
  static Subspace full(int n, double tol = default_tolerance());

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  double tol() const { return tol_; }
  /// Orthonormal basis, ambient_dim x dim.
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// Distance from v to the subspace.
  double distance(const Eigen::VectorXd& v) const;
  /// distance(v) / max(|v|, scale); 0 for v = 0 and scale = 0.
  double residual(const Eigen::VectorXd& v, double scale = 0.0) const;
  bool contains(const Eigen::VectorXd& v, double scale = 0.0) const;
  bool contains(const Subspace& other) const;

  /// Orthogonal projector onto the subspace applied to v.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

 private:
  int n_ = 0;
  double tol_ = 1e-9;
  Eigen::MatrixXd basis_;
};

Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersect(const Subspace& a, const Subspace& b);
/// Annihilator in the dual fiber, identified with R^n through the coordinate basis.
Subspace annihilator(const Subspace& a);
/// {v in within : omega(v, a) = 0 for all a in A}
Subspace orthogonal_wrt_form(const Subspace& a, const Eigen::MatrixXd& omega, const Subspace& within);
/// Dimension-plus-containment equality.
bool equals(const Subspace& a, const Subspace& b);
/// Largest residual of the columns of b against a (0 when b is zero).
double containment_residual(const Subspace& a, const Eigen::MatrixXd& columns);

/// Columns spanning the null space of M, using the cutoff tol * max(sigma_max, scale).
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double tol, double scale = 0.0);

}  // namespace dk
