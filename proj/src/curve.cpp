#include "fractal_calc/curve.hpp"

#include "fractal_calc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fcalc {

Point make_point(std::initializer_list<double> coords) {
  if (coords.size() == 0 || coords.size() > kMaxEmbeddingDim) {
    throw ArgumentError("point dimension must be in [1, " +
                        std::to_string(kMaxEmbeddingDim) + "]");
  }
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

const char* to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::self_similar: return "self_similar";
    case CurveKind::weierstrass_graph: return "weierstrass_graph";
    case CurveKind::polyline: return "polyline";
    case CurveKind::line_segment: return "line_segment";
  }
  return "unknown";
}

double weierstrass_tail_bound(const WeierstrassSpec& spec) {
  const double r = std::pow(spec.lambda, spec.s - 2.0);
  return std::pow(spec.lambda, (spec.s - 2.0) * (spec.terms + 1)) / (1.0 - r);
}

Curve::Curve(Payload payload, Interval domain, int dim)
    : payload_(std::move(payload)), domain_(domain), dim_(dim) {
  if (!(domain_.lo < domain_.hi)) {
    throw ArgumentError("curve domain requires a0 < b0");
  }
  offset_ = Point::Zero(dim_);
  precompute();
}

Curve Curve::self_similar(SelfSimilarSpec spec) {
  if (spec.transforms.size() < 2) {
    throw ArgumentError("self-similar curve needs at least two maps");
  }
  if (spec.depth < 1) throw ArgumentError("recursion depth must be >= 1");
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  for (const auto& tr : spec.transforms) {
    if (!(tr.scale > 0.0 && tr.scale < 1.0)) {
      throw ArgumentError("similarity scale must lie in (0, 1)");
    }
    sum += tr.scale * Eigen::Rotation2Dd(tr.theta).toRotationMatrix();
  }
  // The maps must compose to a curve: sum_i T_i v = v for every v.
  if ((sum - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ArgumentError("similarity maps violate sum_i T_i = I");
  }
  return Curve(std::move(spec), {0.0, 1.0}, 2);
}

Curve Curve::weierstrass(WeierstrassSpec spec, Interval domain) {
  if (!(spec.lambda > 1.0)) throw ArgumentError("Weierstrass lambda must be > 1");
  if (!(spec.s > 1.0 && spec.s < 2.0)) {
    throw ArgumentError("Weierstrass s must lie in (1, 2)");
  }
  if (spec.terms < 1) throw ArgumentError("Weierstrass truncation needs >= 1 term");
  return Curve(spec, domain, 2);
}

Curve Curve::polyline(PolylineSpec spec, Interval domain) {
  if (spec.vertices.size() < 2) throw ArgumentError("polyline needs >= 2 vertices");
  const auto dim = spec.vertices.front().size();
  if (dim < 1 || dim > kMaxEmbeddingDim) {
    throw ArgumentError("polyline embedding dimension out of range");
  }
  for (const auto& v : spec.vertices) {
    if (v.size() != dim) throw ArgumentError("polyline vertices differ in dimension");
  }
  return Curve(std::move(spec), domain, static_cast<int>(dim));
}

Curve Curve::line_segment(LineSegmentSpec spec, Interval domain) {
  const auto dim = spec.from.size();
  if (dim < 1 || dim > kMaxEmbeddingDim || spec.to.size() != dim) {
    throw ArgumentError("line segment endpoints must share a valid dimension");
  }
  if ((spec.to - spec.from).norm() == 0.0) {
    throw ArgumentError("line segment endpoints coincide");
  }
  return Curve(std::move(spec), domain, static_cast<int>(dim));
}

void Curve::precompute() {
  const auto* ss = std::get_if<SelfSimilarSpec>(&payload_);
  if (ss == nullptr) return;
  maps_.clear();
  prefix_.clear();
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (const auto& tr : ss->transforms) {
    Eigen::Matrix2d m = tr.scale * Eigen::Rotation2Dd(tr.theta).toRotationMatrix();
    maps_.push_back(m);
    prefix_.push_back(acc);
    acc += m * ss->v0;
  }
}

CurveKind Curve::kind() const {
  return static_cast<CurveKind>(payload_.index());
}

double Curve::warp(double t) const {
  if (reparam_power_ == 1.0) return t;
  const double x = (t - domain_.lo) / domain_.width();
  return domain_.lo + domain_.width() * std::pow(x, reparam_power_);
}

Point Curve::apply_post(const Point& p) const {
  if (!linear_) return p + offset_;
  return Point(*linear_ * p + offset_);
}

Point Curve::evaluate_base(double t, int depth) const {
  switch (kind()) {
    case CurveKind::self_similar: {
      const auto& ss = std::get<SelfSimilarSpec>(payload_);
      const int n = static_cast<int>(maps_.size());
      Eigen::Vector2d result = Eigen::Vector2d::Zero();
      Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();
      double u = t;
      for (int level = 0; level < depth; ++level) {
        // the last map owns the right endpoint
        int k = std::min(static_cast<int>(std::floor(n * u)), n - 1);
        k = std::max(k, 0);
        result += frame * prefix_[k];
        frame = frame * maps_[k];
        u = n * u - k;
      }
      // base case: straight chord of the remaining sub-curve
      result += frame * (u * ss.v0);
      Point p(2);
      p << result.x(), result.y();
      return p;
    }
    case CurveKind::weierstrass_graph: {
      const auto& ws = std::get<WeierstrassSpec>(payload_);
      const double amp = std::pow(ws.lambda, ws.s - 2.0);
      double a = 1.0;
      double freq = 1.0;
      double sum = 0.0;
      for (int k = 1; k <= ws.terms; ++k) {
        a *= amp;
        freq *= ws.lambda;
        sum += a * std::sin(freq * t);
      }
      Point p(2);
      p << t, sum;
      return p;
    }
    case CurveKind::polyline: {
      const auto& pl = std::get<PolylineSpec>(payload_);
      const int segments = static_cast<int>(pl.vertices.size()) - 1;
      const double x = (t - domain_.lo) / domain_.width() * segments;
      const int k = std::clamp(static_cast<int>(std::floor(x)), 0, segments - 1);
      const double f = x - k;
      return Point((1.0 - f) * pl.vertices[k] + f * pl.vertices[k + 1]);
    }
    case CurveKind::line_segment: {
      const auto& ls = std::get<LineSegmentSpec>(payload_);
      const double f = (t - domain_.lo) / domain_.width();
      return Point((1.0 - f) * ls.from + f * ls.to);
    }
  }
  throw ArgumentError("unknown curve kind");
}

Point Curve::evaluate(double t) const {
  if (!domain_.contains(t)) {
    throw DomainError("parameter " + std::to_string(t) + " outside curve domain [" +
                      std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) +
                      "]");
  }
  int depth = 0;
  if (const auto* ss = std::get_if<SelfSimilarSpec>(&payload_)) depth = ss->depth;
  return apply_post(evaluate_base(warp(t), depth));
}

Point Curve::evaluate_at_depth(double t, int depth) const {
  if (kind() != CurveKind::self_similar) {
    throw ArgumentError("evaluate_at_depth requires a self-similar curve");
  }
  if (!domain_.contains(t)) throw DomainError("parameter outside curve domain");
  if (depth < 0) throw ArgumentError("depth must be >= 0");
  return apply_post(evaluate_base(warp(t), depth));
}

double Curve::max_scale() const {
  const auto* ss = std::get_if<SelfSimilarSpec>(&payload_);
  if (ss == nullptr) return 1.0;
  double s = 0.0;
  for (const auto& tr : ss->transforms) s = std::max(s, tr.scale);
  return s;
}

Curve Curve::translated(const Point& v) const {
  if (v.size() != dim_) throw ArgumentError("translation dimension mismatch");
  Curve c = *this;
  c.offset_ = offset_ + v;
  return c;
}

Curve Curve::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw ArgumentError("scale factor must be positive");
  Curve c = *this;
  Eigen::MatrixXd base =
      linear_ ? *linear_ : Eigen::MatrixXd::Identity(dim_, dim_);
  c.linear_ = lambda * base;
  c.offset_ = lambda * offset_;
  return c;
}

Curve Curve::rotated(const Eigen::MatrixXd& rotation) const {
  if (rotation.rows() != dim_ || rotation.cols() != dim_) {
    throw ArgumentError("rotation dimension mismatch");
  }
  const Eigen::MatrixXd gram = rotation.transpose() * rotation;
  if ((gram - Eigen::MatrixXd::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > 1e-12) {
    throw ArgumentError("rotation matrix is not orthogonal");
  }
  Curve c = *this;
  Eigen::MatrixXd base =
      linear_ ? *linear_ : Eigen::MatrixXd::Identity(dim_, dim_);
  c.linear_ = rotation * base;
  c.offset_ = Point(rotation * offset_);
  return c;
}

Curve Curve::rotated(double angle) const {
  if (dim_ != 2) throw ArgumentError("planar rotation requires a 2-D curve");
  return rotated(Eigen::MatrixXd(Eigen::Rotation2Dd(angle).toRotationMatrix()));
}

Curve Curve::reparametrized(double power) const {
  if (!(power > 0.0)) throw ArgumentError("re-parametrization power must be positive");
  Curve c = *this;
  c.reparam_power_ = reparam_power_ * power;
  return c;
}

Curve von_koch(int depth) {
  constexpr double third = 1.0 / 3.0;
  constexpr double sixty = std::numbers::pi / 3.0;
  SelfSimilarSpec spec;
  spec.transforms = {{third, 0.0}, {third, sixty}, {third, -sixty}, {third, 0.0}};
  spec.v0 = Eigen::Vector2d::UnitX();
  spec.depth = depth;
  return Curve::self_similar(std::move(spec));
}

Curve minkowski_sausage(int depth) {
  constexpr double quarter = 0.25;
  constexpr double right = std::numbers::pi / 2.0;
  SelfSimilarSpec spec;
  spec.transforms = {{quarter, 0.0},    {quarter, right}, {quarter, 0.0},
                     {quarter, -right}, {quarter, -right}, {quarter, 0.0},
                     {quarter, right},  {quarter, 0.0}};
  spec.v0 = Eigen::Vector2d::UnitX();
  spec.depth = depth;
  return Curve::self_similar(std::move(spec));
}

Curve unit_line() {
  return Curve::line_segment({make_point({0.0, 0.0}), make_point({1.0, 0.0})});
}

Curve weierstrass_graph(WeierstrassSpec spec) { return Curve::weierstrass(spec); }

Point evaluate(const Curve& curve, double t) { return curve.evaluate(t); }

double chord_length(const Curve& curve, double t1, double t2) {
  if (t1 == t2) {
    (void)curve.evaluate(t1);
    return 0.0;
  }
  return (curve.evaluate(t2) - curve.evaluate(t1)).norm();
}

InjectivityReport injectivity_probe(const Curve& curve, int samples,
                                    double relative_tolerance) {
  if (samples < 3) throw ArgumentError("injectivity probe needs >= 3 samples");
  const Interval dom = curve.domain();
  std::vector<double> ts(samples);
  std::vector<Point> pts(samples);
  for (int i = 0; i < samples; ++i) {
    ts[i] = dom.lo + dom.width() * i / (samples - 1);
    pts[i] = curve.evaluate(ts[i]);
  }
  double diameter2 = 0.0;
  double min_sep2 = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    for (int j = i + 2; j < samples; ++j) {
      const double d2 = (pts[j] - pts[i]).squaredNorm();
      diameter2 = std::max(diameter2, d2);
      if (d2 < min_sep2) min_sep2 = d2;
      const double ratio = std::sqrt(d2) / (ts[j] - ts[i]);
      if (ratio < min_ratio) min_ratio = ratio;
    }
  }
  InjectivityReport report;
  report.samples = samples;
  report.min_separation = std::sqrt(min_sep2);
  report.min_chord_ratio = min_ratio;
  report.self_intersection =
      report.min_separation <= relative_tolerance * std::sqrt(diameter2);
  return report;
}

}  // namespace fcalc
