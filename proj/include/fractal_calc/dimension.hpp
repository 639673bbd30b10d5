#pragma once

#include "fractal_calc/curve.hpp"
#include "fractal_calc/mass.hpp"

#include <utility>
#include <vector>

namespace fcalc {

struct RatioSample {
  double alpha = 0.0;
  double ratio = 0.0;
};

struct DimensionOptions {
  double delta_fine = 0.0125;
  double delta_coarse = 0.05;
  // seeded runs averaged per scale inside each R(alpha)
  int repeats = 3;
  int max_iterations = 12;
  // |R(1) - 1| below this means the lower bracket end is the dimension
  double unity_tolerance = 1e-6;
};

struct DimensionEstimate {
  double alpha0 = 0.0;
  std::vector<std::pair<double, double>> bracket_history;
  std::vector<RatioSample> ratios;
  double delta_fine = 0.0;
  double delta_coarse = 0.0;
  bool lower_end_hit = false;
};

// R(alpha) = sigma^alpha[F, P(delta1)] / sigma^alpha[F, P(delta2)] over the
// whole curve, each side the mean of `repeats` independently seeded runs.
// R > 1 below the gamma-dimension, R < 1 above it.
double ratio_R(const Curve& curve, double alpha, double delta1, double delta2,
               const OptimizerConfig& cfg, int repeats = 3);

// Bisection on [1, m] driven by the sign of R(alpha) - 1.
DimensionEstimate estimate_dimension(const Curve& curve, double tol,
                                     const OptimizerConfig& cfg,
                                     const DimensionOptions& options = {});

// log m / log n for m copies scaled by 1/n.
double self_similar_dimension(int m_copies, int n_scale);

}  // namespace fcalc
