#pragma once

#include "fractal_calc/curve.hpp"
#include "fractal_calc/mass.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fcalc {

// Sampled rise function S(t) = gamma^alpha(F, p0, t) on an increasing
// parameter grid, evaluated by monotone piecewise-linear interpolation.
class StaircaseTable {
 public:
  StaircaseTable(double alpha, std::vector<double> params, std::vector<double> values,
                 double origin);

  double alpha() const { return alpha_; }
  double origin() const { return origin_; }
  std::span<const double> params() const { return params_; }
  std::span<const double> values() const { return values_; }
  Interval domain() const { return {params_.front(), params_.back()}; }
  // [S(a0), S(b0)]
  Interval range() const { return {values_.front(), values_.back()}; }
  bool strictly_increasing() const;

  // The same rise function re-anchored so that S(origin) = 0.
  StaircaseTable with_origin(double origin) const;

  // Optimizer provenance, zero for hand-built tables.
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> segment_masses;

 private:
  double alpha_;
  double origin_;
  std::vector<double> params_;
  std::vector<double> values_;
};

// S(u_k) on a uniform grid of `grid_size` segments over the curve domain,
// accumulated from one optimization per segment.
StaircaseTable staircase(const Curve& curve, double alpha, int grid_size,
                         const OptimizerConfig& cfg);

double staircase_eval(const StaircaseTable& table, double t);
double staircase_inverse(const StaircaseTable& table, double s);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

// Least-squares fit of log S(t) against log |w(t) - w(a0)| over the grid
// points with t > a0; the slope approximates alpha.
LogLogFit rise_distance_fit(const Curve& curve, const StaircaseTable& table);

}  // namespace fcalc
