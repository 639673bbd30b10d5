#include "fractal_calc/errors.hpp"
#include "fractal_calc/expression.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fcalc;

TEST_CASE("constants and precedence") {
  CHECK(evaluate_constant("1 + 2 * 3") == 7.0);
  CHECK(evaluate_constant("(1 + 2) * 3") == 9.0);
  CHECK(evaluate_constant("2 ^ 3 ^ 2") == 512.0);
  CHECK(evaluate_constant("-2 ^ 2") == -4.0);
  CHECK(evaluate_constant("8 / 4 / 2") == 1.0);
  CHECK(evaluate_constant("1 - 2 - 3") == -4.0);
  CHECK(evaluate_constant("--3") == 3.0);
  CHECK(evaluate_constant("1.5e-1") == doctest::Approx(0.15));
  CHECK(evaluate_constant("pi") == std::numbers::pi);
  CHECK(evaluate_constant("e") == std::numbers::e);
}

TEST_CASE("functions") {
  CHECK(evaluate_constant("log(4)/log(3)") == std::log(4.0) / std::log(3.0));
  CHECK(evaluate_constant("ln4/ln3") == std::log(4.0) / std::log(3.0));
  CHECK(evaluate_constant("sqrt(16) + abs(-2)") == 6.0);
  CHECK(evaluate_constant("exp(0) + sin(0) + cos(0)") == 2.0);
  CHECK(evaluate_constant("sin(pi/2)^2") == doctest::Approx(1.0));
}

TEST_CASE("variables") {
  const Expression e = Expression::parse("S^2 + x*y - t");
  CHECK(e.uses('S'));
  CHECK(e.uses('x'));
  CHECK(e.uses('t'));
  CHECK_FALSE(Expression::parse("exp(S)").uses('t'));
  Variables v;
  v.S = 3.0;
  v.x = 2.0;
  v.y = 0.5;
  v.t = 4.0;
  CHECK(e(v) == 6.0);
  CHECK(e.text() == "S^2 + x*y - t");
}

TEST_CASE("malformed input") {
  for (const char* bad : {"", "1 +", "(1", "1)", "foo(2)", "sin", "2 $ 3", "1..2", "s"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Expression::parse(bad), ArgumentError);
  }
  CHECK_THROWS_AS(evaluate_constant("t + 1"), ArgumentError);
  CHECK_THROWS_AS(evaluate_constant("log(0)"), ArgumentError);
}
