#include "dirackit/chart.hpp"
#include "dirackit/subspace.hpp"
#include "dirackit/verification.hpp"

#include <doctest.h>

using namespace dk;

namespace {

Eigen::MatrixXd random_matrix(Sampler& s, int r, int c) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = s.normal();
  return m;
}

}  // namespace

TEST_CASE("rank ignores zero columns and respects the relative cutoff") {
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(4, 3);
  cols(0, 0) = 1.0;
  cols(1, 2) = 1e-12;
  CHECK(Subspace(4, cols).dim() == 1);
  CHECK(Subspace(4, cols, 1e-14).dim() == 2);
  CHECK(Subspace(4, Eigen::MatrixXd::Zero(4, 2)).dim() == 0);
  CHECK(Subspace::full(5).dim() == 5);
  CHECK(Subspace::zero(5).dim() == 0);
}

TEST_CASE("sum, intersection and the Grassmann formula on planted overlaps") {
  Sampler s(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd common = random_matrix(s, 7, 2);
    Eigen::MatrixXd a(7, 4), b(7, 3);
    a << common, random_matrix(s, 7, 2);
    b << common, random_matrix(s, 7, 1);
    const Subspace A(7, a), B(7, b);
    const Subspace S = sum(A, B), I = intersect(A, B);
    CHECK(S.dim() == 5);
    CHECK(I.dim() == 2);
    CHECK(S.dim() + I.dim() == A.dim() + B.dim());
    CHECK(A.contains(I));
    CHECK(B.contains(I));
    CHECK(I.contains(Subspace(7, common)));
  }
}

TEST_CASE("double annihilator and orthogonal complements") {
  Sampler s(11);
  const Subspace A(6, random_matrix(s, 6, 2));
  const Subspace Ao = annihilator(A);
  CHECK(Ao.dim() == 4);
  CHECK((Ao.basis().transpose() * A.basis()).norm() < 1e-12);
  CHECK(equals(annihilator(Ao), A));

  // symplectic complement in R^4 with the canonical form
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 2) = w(1, 3) = 1.0;
  w(2, 0) = w(3, 1) = -1.0;
  Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(4, 1);
  e0(0, 0) = 1.0;
  const Subspace L(4, e0);
  const Subspace Lw = orthogonal_wrt_form(L, w, Subspace::full(4));
  CHECK(Lw.dim() == 3);
  CHECK(Lw.contains(L));
  CHECK(Lw.distance(Eigen::Vector4d(0, 0, 1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("null space and containment residual") {
  Eigen::MatrixXd m(2, 4);
  m << 1, 2, 3, 4, 2, 4, 6, 8;
  const Eigen::MatrixXd k = null_space(m, 1e-12);
  CHECK(k.cols() == 3);
  CHECK((m * k).norm() < 1e-12);
  const Subspace K(4, k);
  CHECK(containment_residual(K, k) < 1e-12);
  CHECK(containment_residual(K, Eigen::MatrixXd::Zero(4, 0)) == 0.0);
  CHECK(K.residual(Eigen::Vector4d(1, 2, 3, 4)) == doctest::Approx(1.0));
}

TEST_CASE("grassmann suite passes on 1000 pairs") {
  const CheckOutcome out = grassmann_suite(1000, 3);
  CHECK(out.ok);
  CHECK(out.max_residual < 1e-9);
}

TEST_CASE("sampler is deterministic and stays in the unit interval") {
  Sampler a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const ChartPtr c = make_chart("box", {"x", "y"}, {{-1, 1}, {2, 3}}, {[](const Point& p) { return p(0); }});
  for (const Point& p : sample_points(*c, 200, 5)) {
    CHECK(c->admissible(p));
    CHECK(std::abs(p(0)) >= 1e-3);
    CHECK(p(1) >= 2.0);
  }
}
