#pragma once

#include "fractal_calc/calculus.hpp"
#include "fractal_calc/curve.hpp"
#include "fractal_calc/staircase.hpp"

#include <span>
#include <vector>

namespace fcalc {

// D_F^alpha rho = -kappa rho along a fractal path, rho(w(a0)) = rho0.
struct AbsorptionModel {
  double kappa = 1.0;
  double rho0 = 1.0;
  Curve curve;
  StaircaseTable table;

  void validate() const;
  // rho0 exp(-kappa S(t))
  double density(double t) const;
  CurveFunction density_function() const;
};

struct ProfilePoint {
  double t = 0.0;
  double rise = 0.0;
  double distance = 0.0;  // |w(t) - w(a0)|
  double rho = 0.0;
};

std::vector<double> uniform_grid(Interval domain, int points);

std::vector<ProfilePoint> absorption_profile(const AbsorptionModel& model,
                                             std::span<const double> grid);

struct OdeReport {
  double max_residual = 0.0;             // max |D rho + kappa rho|
  double max_normalized_residual = 0.0;  // divided by kappa rho0 (rho0 if kappa = 0)
  std::vector<double> residuals;
  bool passed = false;
};

OdeReport verify_absorption_ode(const AbsorptionModel& model, std::span<const double> grid,
                                double tol, std::optional<double> step = {});

struct StretchedExponentialFit {
  // log rho against S(t): exact line of slope -kappa
  double rise_slope = 0.0;
  double rise_max_deviation = 0.0;
  // log rho against |w(t) - w(a0)|^alpha, fitted on each half of the grid
  double distance_slope_first_half = 0.0;
  double distance_slope_second_half = 0.0;
  double distance_slope_change = 0.0;  // relative difference of the halves
};

StretchedExponentialFit stretched_exponential_fit(const AbsorptionModel& model,
                                                  std::span<const double> grid);

}  // namespace fcalc
