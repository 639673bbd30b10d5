#pragma once

#include "fractal_calc/staircase.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace fcalc::testing {

// Hand-built rise function S(t) = scale * t^p on [0, 1], finely tabulated so
// the calculus operators can be checked without the Monte Carlo step.
inline StaircaseTable power_table(double p, double scale = 1.0, int n = 4096,
                                  double alpha = 1.0) {
  std::vector<double> params(n + 1);
  std::vector<double> values(n + 1);
  for (int k = 0; k <= n; ++k) {
    params[k] = static_cast<double>(k) / n;
    values[k] = scale * std::pow(params[k], p);
  }
  return StaircaseTable(alpha, std::move(params), std::move(values), 0.0);
}

inline double quadrature(const std::function<double(double)>& g, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 15, 1e-13);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

}  // namespace fcalc::testing
