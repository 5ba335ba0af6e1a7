#include "dirackit/calculus.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace dk;
using dk::test::fd_jacobian;
using dk::test::vec;

namespace {

ChartPtr r3() { return make_chart("R3", {"x", "y", "z"}, {{-2, 2}, {-2, 2}, {-2, 2}}); }

}  // namespace

TEST_CASE("Lie bracket matches the finite-difference commutator") {
  const ChartPtr c = r3();
  const VectorField X = VectorField::parse(c, {"y*z", "sin(x)", "x^2 - y"});
  const VectorField Y = VectorField::parse(c, {"1+z^2", "x*y", "cos(y)*z"});
  const Eigen::VectorXd p = vec({0.3, -0.7, 1.1});
  const Eigen::VectorXd expect = fd_jacobian(Y, p) * X.values(p) - fd_jacobian(X, p) * Y.values(p);
  const Eigen::VectorXd got = lie_bracket(X, Y).values(p);
  CHECK((got - expect).norm() < 1e-8);
}

TEST_CASE("exterior derivative, Cartan formula and interior product") {
  const ChartPtr c = r3();
  const OneForm a = OneForm::parse(c, {"x*y", "z^2*x", "sin(y)"});
  const VectorField X = VectorField::parse(c, {"z", "1+x^2", "-y"});
  const Eigen::VectorXd p = vec({0.5, 0.2, -0.4});
  const Eigen::MatrixXd J = fd_jacobian(a, p);
  const TwoForm da = exterior_derivative_one_form(a);
  const Eigen::MatrixXd expect = J.transpose() - J;  // (d a)_ij = d_i a_j - d_j a_i
  CHECK((da.matrix(p) - expect).norm() < 1e-8);

  const Eigen::VectorXd i_x = interior_product(X, da).values(p);
  CHECK((i_x - da.matrix(p).transpose() * X.values(p)).norm() < 1e-12);

  // L_X a = i_X da + d(a(X)), and (L_X a)(Y) = X[a(Y)] - a([X,Y]) for a test field Y
  const VectorField Y = VectorField::parse(c, {"y", "-x", "x*z"});
  const ScalarField aY = pairing(a, Y);
  const double lhs = pairing(lie_derivative_one_form(X, a), Y)(p);
  const double rhs = differential(aY).values(p).dot(X.values(p)) - pairing(a, lie_bracket(X, Y))(p);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("d of a 2-form on coordinate fields is the cyclic sum of partials") {
  const ChartPtr c = r3();
  const TwoForm w = TwoForm::from_wedges(c, {{"x", "y", "z*x"}, {"y", "z", "sin(x*y)"}, {"x", "z", "y^2"}});
  const Eigen::VectorXd p = vec({0.4, -0.3, 0.9});
  const Eigen::MatrixXd Jw = fd_jacobian(w, p);  // rows index the 9 components
  auto dw = [&](int a, int b, int k) { return Jw(a * 3 + b, k); };
  const double expect = dw(1, 2, 0) + dw(2, 0, 1) + dw(0, 1, 2);
  const double got = d_two_form_contract(w, VectorField::coordinate(c, 0), VectorField::coordinate(c, 1),
                                         VectorField::coordinate(c, 2), p);
  CHECK(got == doctest::Approx(expect).epsilon(1e-7));
  CHECK(got == doctest::Approx(-0.3 * std::cos(-0.12) + 0.4 + 2.0 * 0.3).epsilon(1e-12));
}

TEST_CASE("pullbacks through a map match the chain rule") {
  const ChartPtr src = make_chart("S", {"u", "v"}, {{-1, 1}, {-1, 1}});
  const ChartPtr tgt = r3();
  const PointMap f = PointMap::parse(src, tgt, {"u*v", "u+v^2", "sin(u)"});
  const Eigen::VectorXd p = vec({0.3, -0.6});
  const Eigen::MatrixXd Df = f.jacobian(p);
  CHECK((Df - fd_jacobian(f.components(), p)).norm() < 1e-8);

  const OneForm a = OneForm::parse(tgt, {"y", "z*x", "1"});
  const Eigen::VectorXd pa = pullback(f, a).values(p);
  CHECK((pa - Df.transpose() * a.values(f(p))).norm() < 1e-12);

  const TwoForm w = TwoForm::from_wedges(tgt, {{"x", "z", "y"}, {"y", "z", "1"}});
  const Eigen::MatrixXd pw = pullback(f, w).matrix(p);
  CHECK((pw - Df.transpose() * w.matrix(f(p)) * Df).norm() < 1e-12);

  const ScalarField g = ScalarField::parse(tgt, "x*y*z");
  const Eigen::VectorXd q = f(p);
  CHECK(pullback(f, g)(p) == doctest::Approx(q(0) * q(1) * q(2)));
}

TEST_CASE("fields from different charts do not combine") {
  const ChartPtr a = r3();
  const ChartPtr b = make_chart("R3b", {"x", "y", "z"}, {{-2, 2}, {-2, 2}, {-2, 2}});
  CHECK_THROWS_AS(lie_bracket(VectorField::coordinate(a, 0), VectorField::coordinate(b, 1)), ChartMismatch);
  CHECK_THROWS_AS(VectorField::parse(a, {"x", "y"}), InputError);
}

TEST_CASE("canonical two-form is sum dq ^ dp") {
  const ChartPtr c = make_chart("T*R", {"q", "p_q"}, {{-1, 1}, {-1, 1}});
  const Eigen::MatrixXd w = canonical_two_form(c).matrix(vec({0.1, 0.2}));
  CHECK(w(0, 1) == 1.0);
  CHECK(w(1, 0) == -1.0);
}
