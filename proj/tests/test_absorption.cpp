#include "fractal_calc/absorption.hpp"
#include "fractal_calc/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fcalc;
using fcalc::testing::power_table;

namespace {

AbsorptionModel model(double kappa, double rho0 = 2.0) {
  // S(t) = 0.5 t^1.5 standing in for a measured staircase on the line
  return AbsorptionModel{kappa, rho0, unit_line(), power_table(1.5, 0.5)};
}

}  // namespace

TEST_CASE("density is exponential in the rise") {
  const auto m = model(1.5);
  CHECK(m.density(0.0) == 2.0);
  CHECK(m.density(1.0) == doctest::Approx(2.0 * std::exp(-0.75)).epsilon(1e-12));
  CHECK(m.density_function()(0.64) == doctest::Approx(m.density(0.64)));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(model(-1.0).validate(), ArgumentError);
  CHECK_THROWS_AS(model(1.0, -2.0).validate(), ArgumentError);
  CHECK_NOTHROW(model(0.0).validate());
  CHECK_THROWS_AS(uniform_grid({0.0, 1.0}, 1), ArgumentError);
}

TEST_CASE("profile columns") {
  const auto m = model(1.0);
  const auto grid = uniform_grid({0.0, 1.0}, 5);
  REQUIRE(grid.size() == 5);
  CHECK(grid[4] == 1.0);
  const auto prof = absorption_profile(m, grid);
  CHECK(prof[2].t == 0.5);
  CHECK(prof[2].distance == doctest::Approx(0.5));
  CHECK(prof[2].rise == doctest::Approx(0.5 * std::pow(0.5, 1.5)).epsilon(1e-6));
  CHECK(prof[2].rho == doctest::Approx(2.0 * std::exp(-prof[2].rise)));
}

TEST_CASE("the profile solves the ODE") {
  const auto grid = uniform_grid({0.0, 1.0}, 64);
  for (double kappa : {0.5, 1.0, 2.0}) {
    const OdeReport r = verify_absorption_ode(model(kappa), grid, 1e-3);
    CHECK(r.passed);
    CHECK(r.max_normalized_residual < 1e-6);
    CHECK(r.residuals.size() == 64);
  }
  const OdeReport flat = verify_absorption_ode(model(0.0), grid, 1e-3);
  CHECK(flat.max_residual == 0.0);
}

TEST_CASE("log density is linear in the rise") {
  const auto grid = uniform_grid({0.0, 1.0}, 64);
  const auto fit = stretched_exponential_fit(model(2.0), grid);
  CHECK(std::fabs(fit.rise_slope + 2.0) < 1e-9);
  CHECK(fit.rise_max_deviation < 1e-9);
}
