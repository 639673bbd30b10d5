#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace fcalc {

inline constexpr int kMaxEmbeddingDim = 8;

// Points live on the stack; the dimension is fixed per curve at runtime.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                            kMaxEmbeddingDim, 1>;

Point make_point(std::initializer_list<double> coords);

enum class CurveKind { self_similar, weierstrass_graph, polyline, line_segment };

const char* to_string(CurveKind kind);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

// T_i = scale * R(theta).
struct Similarity {
  double scale = 0.0;
  double theta = 0.0;
};

struct SelfSimilarSpec {
  std::vector<Similarity> transforms;
  Eigen::Vector2d v0 = Eigen::Vector2d::UnitX();
  int depth = 12;
};

struct WeierstrassSpec {
  double lambda = 2.0;
  double s = 1.5;
  int terms = 60;
};

struct PolylineSpec {
  std::vector<Point> vertices;
};

struct LineSegmentSpec {
  Point from;
  Point to;
};

// Upper bound on |W - W_K| for the Weierstrass series truncated after
// `terms` terms.
double weierstrass_tail_bound(const WeierstrassSpec& spec);

// A continuous, one-to-one parametrization w : [a0, b0] -> R^m.
//
// Instances are immutable. Besides the four base kinds a curve may carry a
// similarity post-map (x -> A x + c) and a power re-parametrization of its
// domain; both are used to probe the invariance properties of the mass.
class Curve {
 public:
  using Payload =
      std::variant<SelfSimilarSpec, WeierstrassSpec, PolylineSpec, LineSegmentSpec>;

  static Curve self_similar(SelfSimilarSpec spec);
  static Curve weierstrass(WeierstrassSpec spec, Interval domain = {0.0, 1.0});
  static Curve polyline(PolylineSpec spec, Interval domain = {0.0, 1.0});
  static Curve line_segment(LineSegmentSpec spec, Interval domain = {0.0, 1.0});

  CurveKind kind() const;
  const Payload& payload() const { return payload_; }
  Interval domain() const { return domain_; }
  int embedding_dim() const { return dim_; }

  // w(t). Throws DomainError outside the domain.
  Point evaluate(double t) const;

  // Self-similar curves only: the recursion unrolled to `depth` levels.
  Point evaluate_at_depth(double t, int depth) const;

  // Largest similarity ratio (self-similar), otherwise 1.
  double max_scale() const;

  const std::optional<Eigen::MatrixXd>& linear_map() const { return linear_; }
  const Point& offset() const { return offset_; }
  double reparam_power() const { return reparam_power_; }

  Curve translated(const Point& v) const;
  Curve scaled(double lambda) const;
  Curve rotated(const Eigen::MatrixXd& rotation) const;
  Curve rotated(double angle) const;
  // w(q(t)) with q(t) = a0 + (b0 - a0) ((t - a0) / (b0 - a0))^power.
  Curve reparametrized(double power) const;

 private:
  Curve(Payload payload, Interval domain, int dim);
  void precompute();
  double warp(double t) const;
  Point evaluate_base(double t, int depth) const;
  Point apply_post(const Point& p) const;

  Payload payload_;
  Interval domain_;
  int dim_ = 2;

  // Self-similar: T_i and the prefix sums sum_{j<i} T_j v0.
  std::vector<Eigen::Matrix2d> maps_;
  std::vector<Eigen::Vector2d> prefix_;

  std::optional<Eigen::MatrixXd> linear_;
  Point offset_;
  double reparam_power_ = 1.0;
};

// Built-in curves.
Curve von_koch(int depth = 12);
// Eight copies at scale 1/4 (quadratic Koch / Minkowski sausage).
Curve minkowski_sausage(int depth = 8);
Curve unit_line();
Curve weierstrass_graph(WeierstrassSpec spec = {});

Point evaluate(const Curve& curve, double t);
double chord_length(const Curve& curve, double t1, double t2);

struct InjectivityReport {
  bool self_intersection = false;
  // min over non-adjacent grid pairs of |w(t) - w(t')|
  double min_separation = 0.0;
  // min over the same pairs of |w(t) - w(t')| / |t - t'|
  double min_chord_ratio = 0.0;
  int samples = 0;
};

// Flags near-coincident images of non-adjacent grid parameters. A diagnostic,
// not a proof of injectivity.
InjectivityReport injectivity_probe(const Curve& curve, int samples = 10000,
                                    double relative_tolerance = 1e-9);

}  // namespace fcalc
