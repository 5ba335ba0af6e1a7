#include "dirackit/expression.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dk;
using dk::test::fd1;
using dk::test::vec;

TEST_CASE("expressions evaluate with parameters folded in") {
  const Expression e = Expression::parse("a*x^2 - sin(y)/sqrt(1+x^2)", {"x", "y"}, {{"a", 3.0}});
  const Eigen::VectorXd p = vec({0.6, -0.2});
  CHECK(e.eval(p) == doctest::Approx(3.0 * 0.36 - std::sin(-0.2) / std::sqrt(1.36)));
  CHECK(e.variables().size() == 2);
  CHECK_FALSE(e.is_constant());
  CHECK(Expression::parse("2*a", {"x"}, {{"a", 1.5}}).is_constant());
  CHECK(Expression::parse("0", {"x"}).is_zero_literal());
}

TEST_CASE("canonical text is a fixed point of parse") {
  const std::vector<std::string> vars = {"theta", "p_x", "p_y"};
  for (const char* src : {"-p_x*sin(theta) + p_y*cos(theta)", "1/(1+p_x^2)^3", "-(p_x - -p_y)", "2.5e-3*theta",
                          "cos(sin(theta))^2 - p_y/p_x/theta"}) {
    const Expression e = Expression::parse(src, vars);
    const std::string t = e.to_string();
    const Expression back = Expression::parse(t, vars);
    CHECK(back.to_string() == t);
    const Eigen::VectorXd p = vec({0.4, 1.3, -0.9});
    CHECK(back.eval(p) == doctest::Approx(e.eval(p)).epsilon(1e-15));
  }
}

TEST_CASE("jet evaluation matches finite differences") {
  const Expression e = Expression::parse("x*y^3 + cos(x*y) - 1/(2+y^2)", {"x", "y"});
  const Eigen::VectorXd p = vec({0.8, -0.5});
  const Jet j = e.eval(coordinate_jets(p), 2);
  auto f = [&](const Eigen::VectorXd& q) { return e.eval(q); };
  for (int i = 0; i < 2; ++i) CHECK(j.d(i) == doctest::Approx(fd1(f, p, i)).epsilon(1e-8));
}

TEST_CASE("syntax errors report the byte offset") {
  const std::vector<std::string> vars = {"x", "y"};
  auto offset_of = [&](const char* src) -> long {
    try {
      Expression::parse(src, vars);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("x + z") == 4);
  CHECK(offset_of("x * (y + 1") == 10);
  CHECK(offset_of("x ^ y") == 4);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("x y") == 2);
  CHECK(offset_of("tan(x)") == 0);
  CHECK_THROWS_AS(Expression::parse("x", vars).eval(vec({1.0})), DimensionError);
}
