#include "dirackit/jet_linalg.hpp"

#include "dirackit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dk {

JetMatrix::JetMatrix(int r, int c, int dim)
    : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Jet::constant(0.0, dim)), jet_dim(dim) {}

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = (*this)(r, c).value();
  }
  return m;
}

JetList JetMatrix::column(int c) const {
  JetList out;
  out.reserve(rows);
  for (int r = 0; r < rows; ++r) out.push_back((*this)(r, c));
  return out;
}

JetMatrix JetMatrix::from_columns(const std::vector<JetList>& cols, int dim) {
  const int r = cols.empty() ? 0 : static_cast<int>(cols.front().size());
  JetMatrix m(r, static_cast<int>(cols.size()), dim);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (static_cast<int>(cols[c].size()) != r) throw DimensionError("from_columns: ragged columns");
    for (int i = 0; i < r; ++i) m(i, static_cast<int>(c)) = cols[c][i];
  }
  return m;
}

int numeric_rank(const Eigen::MatrixXd& A, double tol, double scale) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd& s = svd.singularValues();
  const double ref = std::max(s.size() ? s(0) : 0.0, scale);
  if (ref <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * ref) ++r;
  }
  return r;
}

std::vector<int> pivot_columns(const Eigen::MatrixXd& A, int rank) {
  std::vector<int> cols;
  if (rank <= 0) return cols;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const auto& perm = qr.colsPermutation().indices();
  for (int i = 0; i < rank; ++i) cols.push_back(perm(i));
  std::sort(cols.begin(), cols.end());
  return cols;
}

JetMatrix solve(const JetMatrix& A, const JetMatrix& B) {
  if (A.rows != A.cols || B.rows != A.rows) throw DimensionError("solve: shape mismatch");
  const int n = A.rows;
  JetMatrix M = A;
  JetMatrix R = B;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(M(i, k).value()) > std::abs(M(piv, k).value())) piv = i;
    }
    if (M(piv, k).value() == 0.0) throw RankError("solve", "singular jet system");
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(M(k, c), M(piv, c));
      for (int c = 0; c < R.cols; ++c) std::swap(R(k, c), R(piv, c));
    }
    const Jet inv = 1.0 / M(k, k);
    for (int i = k + 1; i < n; ++i) {
      if (M(i, k).value() == 0.0 && M(i, k).order() >= 1 && M(i, k).grad().isZero(0.0) &&
          (M(i, k).order() < 2 || M(i, k).hess().isZero(0.0))) {
        continue;
      }
      const Jet f = M(i, k) * inv;
      for (int c = k; c < n; ++c) M(i, c) -= f * M(k, c);
      for (int c = 0; c < R.cols; ++c) R(i, c) -= f * R(k, c);
    }
  }
  JetMatrix X(n, R.cols, A.dim() ? A.dim() : B.dim());
  for (int c = 0; c < R.cols; ++c) {
    for (int i = n - 1; i >= 0; --i) {
      Jet s = R(i, c);
      for (int j = i + 1; j < n; ++j) s -= M(i, j) * X(j, c);
      X(i, c) = s / M(i, i);
    }
  }
  return X;
}

namespace {

JetMatrix select(const JetMatrix& A, const std::vector<int>& rows, const std::vector<int>& cols) {
  JetMatrix S(static_cast<int>(rows.size()), static_cast<int>(cols.size()), A.dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      S(static_cast<int>(r), static_cast<int>(c)) = A(rows[r], cols[c]);
    }
  }
  return S;
}

std::vector<int> complement(const std::vector<int>& picked, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(picked.begin(), picked.end(), i)) out.push_back(i);
  }
  return out;
}

struct Pivots {
  int rank;
  std::vector<int> rows;
  std::vector<int> cols;
};

Pivots choose_pivots(const JetMatrix& A, double tol, double scale) {
  const Eigen::MatrixXd v = A.values();
  Pivots p;
  p.rank = numeric_rank(v, tol, scale);
  if (p.rank == 0) return p;
  p.rows = pivot_columns(v.transpose(), p.rank);
  Eigen::MatrixXd vr(p.rank, v.cols());
  for (int i = 0; i < p.rank; ++i) vr.row(i) = v.row(p.rows[i]);
  p.cols = pivot_columns(vr, p.rank);
  return p;
}

}  // namespace

JetMatrix kernel_frame(const JetMatrix& A, double tol, double scale) {
  const int dim = A.dim();
  const Pivots p = choose_pivots(A, tol, scale);
  const std::vector<int> free = complement(p.cols, A.cols);
  JetMatrix K(A.cols, static_cast<int>(free.size()), dim);
  for (std::size_t f = 0; f < free.size(); ++f) K(free[f], static_cast<int>(f)) = Jet::constant(1.0, dim);
  if (p.rank == 0 || free.empty()) return K;
  const JetMatrix AP = select(A, p.rows, p.cols);
  JetMatrix rhs = select(A, p.rows, free);
  for (Jet& j : rhs.a) j = -j;
  const JetMatrix X = solve(AP, rhs);
  for (int i = 0; i < p.rank; ++i) {
    for (std::size_t f = 0; f < free.size(); ++f) K(p.cols[i], static_cast<int>(f)) = X(i, static_cast<int>(f));
  }
  return K;
}

JetMatrix particular_solution(const JetMatrix& A, const JetMatrix& B, double tol, double scale) {
  if (B.rows != A.rows) throw DimensionError("particular_solution: shape mismatch");
  const int dim = A.dim() ? A.dim() : B.dim();
  const Pivots p = choose_pivots(A, tol, scale);
  JetMatrix X(A.cols, B.cols, dim);
  if (p.rank == 0) return X;
  std::vector<int> all_b(B.cols);
  for (int c = 0; c < B.cols; ++c) all_b[c] = c;
  const JetMatrix sol = solve(select(A, p.rows, p.cols), select(B, p.rows, all_b));
  for (int i = 0; i < p.rank; ++i) {
    for (int c = 0; c < B.cols; ++c) X(p.cols[i], c) = sol(i, c);
  }
  return X;
}

std::vector<int> independent_subset(const Eigen::MatrixXd& columns, double tol, double scale) {
  return pivot_columns(columns, numeric_rank(columns, tol, scale));
}

}  // namespace dk
