#include <doctest.h>

#include <cmath>

#include "fermi/errors.hpp"
#include "fermi/expression.hpp"
#include "fermi/taylor.hpp"

using namespace fermi;

TEST_CASE("taylor series of elementary functions match known coefficients") {
  Taylor x = Taylor::variable(6, 0.0);
  Taylor e = exp(x);
  double fact = 1.0;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) fact *= k;
    CHECK(e[k] == doctest::Approx(1.0 / fact).epsilon(1e-15));
  }
  Taylor s = sin(x);
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK(s[3] == doctest::Approx(-1.0 / 6.0));
  CHECK(s[5] == doctest::Approx(1.0 / 120.0));
  Taylor one = sin(x) * sin(x) + cos(x) * cos(x);
  CHECK(one[0] == doctest::Approx(1.0));
  for (int k = 1; k <= 6; ++k) CHECK(std::fabs(one[k]) < 1e-15);
}

TEST_CASE("taylor division, log and sqrt invert multiplication, exp and squaring") {
  Taylor x = Taylor::variable(7, 0.3);
  Taylor a = exp(x) + 2.0;
  Taylor b = cos(x) + 1.5;
  Taylor q = (a * b) / b;
  Taylor l = exp(log(a));
  Taylor r = sqrt(a) * sqrt(a);
  for (int k = 0; k <= 7; ++k) {
    CHECK(q[k] == doctest::Approx(a[k]).epsilon(1e-13));
    CHECK(l[k] == doctest::Approx(a[k]).epsilon(1e-13));
    CHECK(r[k] == doctest::Approx(a[k]).epsilon(1e-13));
  }
}

TEST_CASE("taylor composition with a series vanishing at zero") {
  Taylor x = Taylor::variable(6, 0.0);
  Taylor inner = sin(x);
  Taylor outer = exp(x);
  Taylor direct = exp(sin(x));
  Taylor comp = outer.compose(inner);
  for (int k = 0; k <= 6; ++k) CHECK(comp[k] == doctest::Approx(direct[k]).epsilon(1e-14));
}

TEST_CASE("hessian numbers match hand derivatives") {
  Hess2 x = Hess2::var_x(0.7);
  Hess2 y = Hess2::var_y(-0.4);
  Hess2 f = x * x * y + sin(y) / x;
  // f = x^2 y + sin(y)/x
  CHECK(f.gx == doctest::Approx(2 * 0.7 * -0.4 - std::sin(-0.4) / (0.49)));
  CHECK(f.gy == doctest::Approx(0.49 + std::cos(-0.4) / 0.7));
  CHECK(f.hxx == doctest::Approx(2 * -0.4 + 2 * std::sin(-0.4) / (0.7 * 0.7 * 0.7)));
  CHECK(f.hxy == doctest::Approx(2 * 0.7 - std::cos(-0.4) / 0.49));
  CHECK(f.hyy == doctest::Approx(-std::sin(-0.4) / 0.7));
}

TEST_CASE("expression parser precedence and functions") {
  auto e = Expression::parse("k1^2/4+k2^2-1");
  CHECK(e.eval(2.0, 0.0) == doctest::Approx(0.0));
  CHECK(e.eval(0.0, 0.0) == doctest::Approx(-1.0));
  CHECK(Expression::parse("-k1^2").eval(3.0, 0.0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("2^3^2").eval(0.0, 0.0) == doctest::Approx(512.0));
  CHECK(Expression::parse("cos(k1)*sin(k2) - (1 - 2)").eval(0.0, 0.5) == doctest::Approx(std::sin(0.5) + 1.0));
  CHECK(Expression::parse("k1^0.5").eval(4.0, 0.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(Expression::parse("k1 +"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(k1)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(k1"), ParseError);
}
