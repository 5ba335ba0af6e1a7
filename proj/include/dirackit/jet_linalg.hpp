#pragma once

#include "dirackit/jet.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dk {

/**
 * Dense matrix of jets, row-major.
 *
 * The solvers below make every discrete decision (rank, pivot rows and
 * columns) from the values at the current point, then carry out the
 * arithmetic in jets.  Where the rank is locally constant the result is the
 * jet of a smooth local frame, which is all that brackets and exterior
 * derivatives need.
 */
struct JetMatrix {
  int rows = 0;
  int cols = 0;
  JetList a;
  int jet_dim = 0;

  JetMatrix() = default;
  JetMatrix(int r, int c, int dim);

  Jet& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  const Jet& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  int dim() const { return a.empty() ? jet_dim : a.front().dim(); }
  Eigen::MatrixXd values() const;
  JetList column(int c) const;
  static JetMatrix from_columns(const std::vector<JetList>& cols, int dim);
};

/// Count of singular values above tol * max(sigma_max, scale).
int numeric_rank(const Eigen::MatrixXd& A, double tol, double scale = 0.0);

/// Indices of `rank` well-conditioned columns chosen by column-pivoted QR,
/// returned in increasing order.
std::vector<int> pivot_columns(const Eigen::MatrixXd& A, int rank);

/// Solution of the square system A X = B by Gaussian elimination with
/// partial pivoting on values.
JetMatrix solve(const JetMatrix& A, const JetMatrix& B);

/// Columns spanning ker A (cols - rank of them).
JetMatrix kernel_frame(const JetMatrix& A, double tol, double scale = 0.0);

/// A solution of the consistent system A X = B (free unknowns set to zero).
JetMatrix particular_solution(const JetMatrix& A, const JetMatrix& B, double tol, double scale = 0.0);

/// Indices of a maximal independent subset of the given column vectors.
std::vector<int> independent_subset(const Eigen::MatrixXd& columns, double tol, double scale = 0.0);

}  // namespace dk
