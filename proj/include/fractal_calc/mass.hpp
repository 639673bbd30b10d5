#pragma once

#include "fractal_calc/curve.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fcalc {

// Gamma(alpha + 1), the normalization shared by every mass sum.
double gamma_factor(double alpha);

// A strictly increasing point set {a = t0 < ... < tn = b} with cached mesh.
class Subdivision {
 public:
  explicit Subdivision(std::vector<double> points);

  static Subdivision uniform(double a, double b, int intervals);

  std::span<const double> points() const { return points_; }
  int intervals() const { return static_cast<int>(points_.size()) - 1; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }
  double mesh() const { return mesh_; }

 private:
  std::vector<double> points_;
  double mesh_ = 0.0;
};

double compute_mesh(std::span<const double> points);

// sigma^alpha[F, P] = sum_i |w(t_{i+1}) - w(t_i)|^alpha / Gamma(alpha + 1).
double sigma_alpha(const Curve& curve, const Subdivision& subdivision, double alpha);

struct OptimizerConfig {
  double alpha = 1.0;
  double delta = 0.05;
  std::uint64_t seed = 0;
  double max_normalized_iters = 2000.0;
  int restarts = 3;
  double insert_floor_fraction = 0.1;
  // Fixed per-point probabilities replacing min(1, delta / (y - x)).
  std::optional<double> shift_probability;
  std::optional<double> remove_probability;
  std::optional<double> insert_probability;

  void validate() const;
};

struct TracePoint {
  double normalized_iteration = 0.0;
  double sigma = 0.0;
};

struct MassEstimate {
  double value = 0.0;  // includes the 1/Gamma(alpha+1) factor
  double delta = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> final_subdivision;
  std::vector<TracePoint> trace;
  std::uint64_t seed = 0;
  int best_restart = 0;
  std::vector<double> restart_values;
  std::uint64_t iterations = 0;
  // delta >= b - a: single-interval subdivisions dominate.
  bool degenerate = false;
};

// Derives the independent RNG seed for sub-stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// One optimizer run from a uniform subdivision of mesh delta/4, seeded with
// `seed` exactly (no restarts).
MassEstimate optimize_single(const Curve& curve, double a, double b,
                             const OptimizerConfig& cfg, std::uint64_t seed);

// Monte Carlo minimization of sigma^alpha over subdivisions of [a, b] with
// mesh <= delta; best of cfg.restarts independently seeded runs.
MassEstimate optimize_subdivision(const Curve& curve, double a, double b,
                                  const OptimizerConfig& cfg);

struct MassLimit {
  // value at the smallest delta, or +infinity when divergence was detected
  double value = 0.0;
  bool diverged = false;
  std::vector<double> deltas;
  std::vector<double> values;
  double spread = 0.0;  // (max - min) / min over the schedule
  // least-squares slope of log(value) against log(delta)
  double log_slope = 0.0;
  bool non_increasing_toward_limit = true;
};

MassLimit mass(const Curve& curve, double a, double b, double alpha,
               std::span<const double> delta_schedule, const OptimizerConfig& cfg);

enum class TransformKind { translate, scale, rotate };

struct CurveTransform {
  TransformKind kind = TransformKind::translate;
  Point translation;
  double factor = 1.0;
  double angle = 0.0;

  static CurveTransform translate(Point v);
  static CurveTransform scale(double lambda);
  static CurveTransform rotate(double angle);

  Curve apply(const Curve& curve) const;
  // lambda^alpha for scaling, 1 otherwise.
  double expected_ratio(double alpha) const;
};

struct InvarianceReport {
  double mass_before = 0.0;
  double mass_after = 0.0;
  double ratio = 0.0;
  double expected_ratio = 1.0;
  double relative_error = 0.0;
};

// Masses of the curve before and after the transform with paired seeds.
InvarianceReport invariance_check(const Curve& curve, const CurveTransform& transform,
                                  const OptimizerConfig& cfg);

}  // namespace fcalc
