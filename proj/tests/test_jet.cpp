#include "dirackit/errors.hpp"
#include "dirackit/jet.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dk;
using dk::test::fd1;
using dk::test::fd2;
using dk::test::vec;

namespace {

using ScalarFn = std::function<Jet(const JetList&)>;

double value_of(const ScalarFn& f, const Eigen::VectorXd& x) { return f(coordinate_jets(x)).value(); }

void require_matches_fd(const ScalarFn& f, const Eigen::VectorXd& x) {
  const Jet j = f(coordinate_jets(x));
  auto fv = [&](const Eigen::VectorXd& y) { return value_of(f, y); };
  CHECK(j.value() == doctest::Approx(fv(x)).epsilon(1e-14));
  for (int i = 0; i < x.size(); ++i) {
    CHECK(j.d(i) == doctest::Approx(fd1(fv, x, i)).epsilon(1e-7));
    for (int k = 0; k < x.size(); ++k) CHECK(j.hess()(i, k) == doctest::Approx(fd2(fv, x, i, k)).epsilon(1e-5));
  }
}

}  // namespace

TEST_CASE("jet arithmetic matches finite differences") {
  const Eigen::VectorXd x = vec({0.7, -1.3, 0.4});
  require_matches_fd([](const JetList& v) { return v[0] * v[1] + 3.0 * v[2] - v[0] / v[1]; }, x);
  require_matches_fd([](const JetList& v) { return 2.0 / (1.0 + v[0] * v[0]) - v[2] * v[1] * v[1]; }, x);
  require_matches_fd([](const JetList& v) { return sin(v[0] * v[2]) + cos(v[1]) * v[0]; }, x);
  require_matches_fd([](const JetList& v) { return sqrt(1.0 + v[1] * v[1]) * pow(v[0], 3) - pow(v[2], -2); }, x);
}

TEST_CASE("derivative lowers the order and differentiates the jet") {
  const Eigen::VectorXd x = vec({0.3, 1.1});
  const JetList v = coordinate_jets(x);
  const Jet f = sin(v[0]) * v[1] * v[1];
  const Jet dfdx = derivative(f, 0);
  CHECK(dfdx.order() == 1);
  CHECK(dfdx.value() == doctest::Approx(std::cos(0.3) * 1.21));
  CHECK(dfdx.d(0) == doctest::Approx(-std::sin(0.3) * 1.21));
  CHECK(dfdx.d(1) == doctest::Approx(2.0 * std::cos(0.3) * 1.1));
  const Jet ddf = derivative(dfdx, 1);
  CHECK(ddf.order() == 0);
  CHECK(ddf.value() == doctest::Approx(2.0 * std::cos(0.3) * 1.1));
  CHECK_THROWS_AS(ddf.grad(), OrderError);
  CHECK_THROWS_AS(derivative(ddf, 0), OrderError);
}

TEST_CASE("arithmetic keeps the minimum order of its operands") {
  const JetList v = coordinate_jets(vec({1.0, 2.0}));
  const Jet low = truncate(v[0], 1);
  CHECK((low * v[1]).order() == 1);
  CHECK((v[0] + v[1]).order() == 2);
  CHECK(min_order({v[0], low}) == 1);
  CHECK(min_order({}) == 2);
  CHECK(low.d(0) == 1.0);
  CHECK_THROWS_AS(low.hess(), OrderError);
}

TEST_CASE("compose applies the second-order chain rule") {
  // outer(u, w) = u^2 w, inner = (sin x, x y) at (x, y)
  const Eigen::VectorXd x = vec({0.5, -0.8});
  const JetList src = coordinate_jets(x);
  const JetList inner = {sin(src[0]), src[0] * src[1]};
  const JetList tgt = coordinate_jets(values(inner));
  const Jet outer = tgt[0] * tgt[0] * tgt[1];
  const Jet composed = compose(outer, inner);
  auto fv = [](const Eigen::VectorXd& y) { return std::sin(y(0)) * std::sin(y(0)) * y(0) * y(1); };
  CHECK(composed.value() == doctest::Approx(fv(x)));
  for (int i = 0; i < 2; ++i) {
    CHECK(composed.d(i) == doctest::Approx(fd1(fv, x, i)).epsilon(1e-7));
    for (int k = 0; k < 2; ++k) CHECK(composed.hess()(i, k) == doctest::Approx(fd2(fv, x, i, k)).epsilon(1e-5));
  }
}

TEST_CASE("jets beyond the capacity are rejected") {
  Eigen::VectorXd big = Eigen::VectorXd::Zero(kMaxDim + 1);
  CHECK_THROWS_AS(coordinate_jets(big), DimensionError);
}
