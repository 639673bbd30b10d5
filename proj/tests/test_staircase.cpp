#include "fractal_calc/errors.hpp"
#include "fractal_calc/staircase.hpp"

#include <doctest.h>

#include <cmath>

using namespace fcalc;

namespace {

const double kKochDim = std::log(4.0) / std::log(3.0);

OptimizerConfig config(double alpha, double delta) {
  OptimizerConfig cfg;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.restarts = 1;
  return cfg;
}

const StaircaseTable& koch_table() {
  static const StaircaseTable table =
      staircase(von_koch(), kKochDim, 16, config(kKochDim, 1.0 / 128));
  return table;
}

}  // namespace

TEST_CASE("table validation") {
  CHECK_THROWS_AS(StaircaseTable(1.0, {0.0, 1.0}, {0.0, -1.0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(StaircaseTable(1.0, {0.0, 0.0}, {0.0, 1.0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(StaircaseTable(1.0, {0.0, 1.0}, {0.0}, 0.0), ArgumentError);
  CHECK_FALSE(StaircaseTable(1.0, {0.0, 0.5, 1.0}, {0.0, 0.0, 1.0}, 0.0).strictly_increasing());
}

TEST_CASE("interpolation and inverse") {
  const StaircaseTable t(1.0, {0.0, 0.5, 1.0}, {0.0, 2.0, 3.0}, 0.0);
  CHECK(staircase_eval(t, 0.25) == doctest::Approx(1.0));
  CHECK(staircase_eval(t, 0.75) == doctest::Approx(2.5));
  CHECK(staircase_inverse(t, 2.5) == doctest::Approx(0.75));
  for (double x : {0.0, 0.1, 0.33, 0.5, 0.9, 1.0}) {
    CHECK(staircase_inverse(t, staircase_eval(t, x)) == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK_THROWS_AS(staircase_eval(t, 1.5), DomainError);
  CHECK_THROWS_AS(staircase_inverse(t, 3.5), DomainError);
}

TEST_CASE("re-anchoring subtracts S at the new origin") {
  const StaircaseTable t(1.0, {0.0, 0.5, 1.0}, {0.0, 2.0, 3.0}, 0.0);
  const StaircaseTable s = t.with_origin(0.5);
  CHECK(staircase_eval(s, 0.5) == doctest::Approx(0.0));
  CHECK(staircase_eval(s, 0.0) == doctest::Approx(-2.0));
  CHECK(staircase_eval(s, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("the unit line rises like t") {
  const StaircaseTable t = staircase(unit_line(), 1.0, 16, config(1.0, 1.0 / 128));
  for (double x = 0.0; x <= 1.0; x += 1.0 / 64) {
    CHECK(std::fabs(staircase_eval(t, x) - x) < 1e-9);
  }
}

TEST_CASE("koch staircase has the self-similar proportions") {
  const StaircaseTable& t = koch_table();
  const double total = staircase_eval(t, 1.0);
  CHECK(total * gamma_factor(kKochDim) > 0.45);
  CHECK(total * gamma_factor(kKochDim) < 0.51);
  // four congruent quarters
  CHECK(std::fabs(4.0 * staircase_eval(t, 0.25) / total - 1.0) < 0.05);
  CHECK(std::fabs(2.0 * staircase_eval(t, 0.5) / total - 1.0) < 0.05);
  CHECK(std::fabs(staircase_inverse(t, total / 2) - 0.5) < 0.02);
  CHECK(t.strictly_increasing());
  REQUIRE(t.segment_masses.size() == 16);
}

TEST_CASE("koch rise grows like distance^alpha") {
  const LogLogFit fit = rise_distance_fit(von_koch(), koch_table());
  CHECK(fit.points == 16);
  CHECK(std::fabs(fit.slope / kKochDim - 1.0) < 0.1);
}
