#include "fractal_calc/mass.hpp"

#include "fractal_calc/errors.hpp"
#include "fractal_calc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fcalc {

double gamma_factor(double alpha) { return std::tgamma(alpha + 1.0); }

double compute_mesh(std::span<const double> points) {
  double mesh = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    mesh = std::max(mesh, points[i] - points[i - 1]);
  }
  return mesh;
}

Subdivision::Subdivision(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ArgumentError("subdivision needs at least two points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw ArgumentError("subdivision points must be strictly increasing");
    }
  }
  mesh_ = compute_mesh(points_);
}

Subdivision Subdivision::uniform(double a, double b, int intervals) {
  if (intervals < 1) throw ArgumentError("uniform subdivision needs >= 1 interval");
  if (!(a < b)) throw ArgumentError("uniform subdivision needs a < b");
  std::vector<double> pts(intervals + 1);
  for (int i = 0; i <= intervals; ++i) pts[i] = a + (b - a) * i / intervals;
  pts.back() = b;
  return Subdivision(std::move(pts));
}

double sigma_alpha(const Curve& curve, const Subdivision& subdivision, double alpha) {
  const auto pts = subdivision.points();
  double sum = 0.0;
  Point prev = curve.evaluate(pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Point next = curve.evaluate(pts[i]);
    sum += std::pow((next - prev).norm(), alpha);
    prev = next;
  }
  return sum / gamma_factor(alpha);
}

void OptimizerConfig::validate() const {
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  if (!(max_normalized_iters > 0.0)) {
    throw ArgumentError("max_normalized_iters must be positive");
  }
  if (restarts < 1) throw ArgumentError("restarts must be >= 1");
  if (!(insert_floor_fraction > 0.0 && insert_floor_fraction < 1.0)) {
    throw ArgumentError("insert_floor_fraction must lie in (0, 1)");
  }
  if (!(alpha >= 1.0)) throw ArgumentError("alpha must be >= 1");
  for (const auto& p : {shift_probability, remove_probability, insert_probability}) {
    if (p && !(*p >= 0.0 && *p <= 1.0)) {
      throw ArgumentError("move probabilities must lie in [0, 1]");
    }
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

namespace {

// Current subdivision with cached images and chord powers
// |w(t_{i+1}) - w(t_i)|^alpha.
class SubdivisionState {
 public:
  SubdivisionState(const Curve& curve, double a, double b, double alpha, int intervals)
      : curve_(curve), half_alpha_(alpha / 2.0) {
    const Subdivision start = Subdivision::uniform(a, b, intervals);
    params_.assign(start.points().begin(), start.points().end());
    images_.reserve(params_.size());
    for (double t : params_) images_.push_back(curve_.evaluate(t));
    powers_.resize(params_.size() - 1);
    for (std::size_t i = 0; i + 1 < params_.size(); ++i) {
      powers_[i] = chord_power(images_[i], images_[i + 1]);
    }
    total_ = std::accumulate(powers_.begin(), powers_.end(), 0.0);
  }

  double chord_power(const Point& p, const Point& q) const {
    return std::pow((q - p).squaredNorm(), half_alpha_);
  }

  const Curve& curve() const { return curve_; }
  int intervals() const { return static_cast<int>(params_.size()) - 1; }
  double total() const { return total_; }
  double param(std::size_t i) const { return params_[i]; }
  const Point& image(std::size_t i) const { return images_[i]; }
  double power(std::size_t i) const { return powers_[i]; }
  const std::vector<double>& params() const { return params_; }

  // Indices [lo, end) of the points in [x, y].
  std::pair<std::size_t, std::size_t> window(double x, double y) const {
    const auto lo = std::lower_bound(params_.begin(), params_.end(), x);
    const auto hi = std::upper_bound(lo, params_.end(), y);
    return {static_cast<std::size_t>(lo - params_.begin()),
            static_cast<std::size_t>(hi - params_.begin())};
  }

  void set_point(std::size_t i, double t, const Point& p) {
    params_[i] = t;
    images_[i] = p;
  }
  void set_power(std::size_t i, double pw) { powers_[i] = pw; }
  void add_to_total(double d) { total_ += d; }

  // Erases the points at the sorted indices `removed`. Chord powers are
  // erased alongside (the chord leaving each removed point).
  void erase_points(const std::vector<std::size_t>& removed) {
    if (removed.empty()) return;
    std::size_t write = removed.front();
    std::size_t next = 0;
    for (std::size_t read = removed.front(); read < params_.size(); ++read) {
      if (next < removed.size() && removed[next] == read) {
        ++next;
        continue;
      }
      params_[write] = params_[read];
      images_[write] = images_[read];
      if (read < powers_.size()) powers_[write] = powers_[read];
      ++write;
    }
    params_.resize(write);
    images_.resize(write);
    powers_.resize(write - 1);
  }

  // Inserts a point inside gap i (between points i and i+1).
  void insert_point(std::size_t gap, double t, const Point& p, double left_power,
                    double right_power) {
    const auto at = static_cast<std::ptrdiff_t>(gap + 1);
    params_.insert(params_.begin() + at, t);
    images_.insert(images_.begin() + at, p);
    powers_[gap] = left_power;
    powers_.insert(powers_.begin() + at, right_power);
  }

  double recompute_total() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < images_.size(); ++i) {
      s += chord_power(images_[i], images_[i + 1]);
    }
    return s;
  }

 private:
  const Curve& curve_;
  double half_alpha_;
  std::vector<double> params_;
  std::vector<Point> images_;
  std::vector<double> powers_;
  double total_ = 0.0;
};

// Visits a Bernoulli(p) selection of the indices first, first+1, ... < end
// by geometric skipping; equivalent in law to one coin flip per index.
class BernoulliWalk {
 public:
  BernoulliWalk(Rng& rng, double p) : rng_(rng), p_(p), log_q_(std::log1p(-p)) {}

  // Next selected index >= from, or `end` when none.
  std::size_t next(std::size_t from, std::size_t end) {
    if (p_ <= 0.0) return end;
    if (p_ >= 1.0) return from;
    const double skip = std::floor(std::log1p(-rng_.uniform()) / log_q_);
    if (skip >= static_cast<double>(end - from)) return end;
    return from + static_cast<std::size_t>(skip);
  }

 private:
  Rng& rng_;
  double p_;
  double log_q_;
};

struct Shifted {
  std::size_t index;
  double t;
  Point image;
};

struct Inserted {
  std::size_t gap;
  double t;
  Point image;
  double left_power;
  double right_power;
};

struct RemovedRun {
  std::size_t first;
  std::size_t last;
  double merged_power;
};

// Move (a): shift interior points of the window by U[-delta/2, delta/2],
// each kept only if order and the mesh bound survive. Returns true if the
// proposal was accepted.
bool propose_shift(SubdivisionState& s, Rng& rng, std::size_t lo, std::size_t last,
                   double p, double delta, std::vector<Shifted>& shifted) {
  shifted.clear();
  BernoulliWalk walk(rng, p);
  for (std::size_t i = walk.next(lo + 1, last); i < last; i = walk.next(i + 1, last)) {
    const double moved = s.param(i) + rng.uniform(-delta / 2.0, delta / 2.0);
    const double prev = (!shifted.empty() && shifted.back().index == i - 1)
                            ? shifted.back().t
                            : s.param(i - 1);
    const double next = s.param(i + 1);
    if (moved > prev && moved < next && moved - prev <= delta && next - moved <= delta) {
      shifted.push_back({i, moved, s.curve().evaluate(moved)});
    }
  }
  if (shifted.empty()) return false;

  double change = 0.0;
  std::vector<std::pair<std::size_t, double>> chords;
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    const std::size_t i = shifted[k].index;
    const bool left_shifted = k > 0 && shifted[k - 1].index == i - 1;
    if (!left_shifted) {
      const double pw = s.chord_power(s.image(i - 1), shifted[k].image);
      chords.emplace_back(i - 1, pw);
      change += pw - s.power(i - 1);
    }
    const bool right_shifted = k + 1 < shifted.size() && shifted[k + 1].index == i + 1;
    const Point& right = right_shifted ? shifted[k + 1].image : s.image(i + 1);
    const double pw = s.chord_power(shifted[k].image, right);
    chords.emplace_back(i, pw);
    change += pw - s.power(i);
  }
  if (!std::isfinite(change)) throw NumericError("non-finite sigma^alpha during shift");
  if (!(change < 0.0)) return false;
  for (const auto& sh : shifted) s.set_point(sh.index, sh.t, sh.image);
  for (const auto& [i, pw] : chords) s.set_power(i, pw);
  s.add_to_total(change);
  return true;
}

// Move (b): remove interior points of the window while the mesh stays
// within delta.
bool propose_remove(SubdivisionState& s, Rng& rng, std::size_t lo, std::size_t last,
                    double p, double delta, std::vector<RemovedRun>& runs,
                    std::vector<std::size_t>& removed) {
  runs.clear();
  removed.clear();
  BernoulliWalk walk(rng, p);
  for (std::size_t i = walk.next(lo + 1, last); i < last; i = walk.next(i + 1, last)) {
    const bool extends = !runs.empty() && runs.back().last == i - 1;
    const std::size_t anchor = extends ? runs.back().first - 1 : i - 1;
    if (s.param(i + 1) - s.param(anchor) <= delta) {
      if (extends) {
        runs.back().last = i;
      } else {
        runs.push_back({i, i, 0.0});
      }
    }
  }
  if (runs.empty()) return false;

  double change = 0.0;
  for (auto& run : runs) {
    run.merged_power = s.chord_power(s.image(run.first - 1), s.image(run.last + 1));
    change += run.merged_power;
    for (std::size_t c = run.first - 1; c <= run.last; ++c) change -= s.power(c);
  }
  if (!std::isfinite(change)) throw NumericError("non-finite sigma^alpha during removal");
  if (!(change < 0.0)) return false;
  for (const auto& run : runs) {
    s.set_power(run.first - 1, run.merged_power);
    for (std::size_t i = run.first; i <= run.last; ++i) removed.push_back(i);
  }
  s.erase_points(removed);
  s.add_to_total(change);
  return true;
}

// Move (c): insert a uniform point into each window gap wider than the floor.
bool propose_insert(SubdivisionState& s, Rng& rng, std::size_t lo, std::size_t last,
                    double p, double floor_width, std::vector<Inserted>& inserted) {
  inserted.clear();
  BernoulliWalk walk(rng, p);
  for (std::size_t g = walk.next(lo, last); g < last; g = walk.next(g + 1, last)) {
    const double left = s.param(g);
    const double right = s.param(g + 1);
    if (!(right - left > floor_width)) continue;
    const double t = rng.uniform(left, right);
    if (!(t > left && t < right)) continue;
    Point image = s.curve().evaluate(t);
    const double lp = s.chord_power(s.image(g), image);
    const double rp = s.chord_power(image, s.image(g + 1));
    inserted.push_back({g, t, std::move(image), lp, rp});
  }
  if (inserted.empty()) return false;

  double change = 0.0;
  for (const auto& in : inserted) change += in.left_power + in.right_power - s.power(in.gap);
  if (!std::isfinite(change)) throw NumericError("non-finite sigma^alpha during insertion");
  if (!(change < 0.0)) return false;
  // back to front keeps earlier gap indices valid
  for (auto it = inserted.rbegin(); it != inserted.rend(); ++it) {
    s.insert_point(it->gap, it->t, it->image, it->left_power, it->right_power);
  }
  s.add_to_total(change);
  return true;
}

}  // namespace

MassEstimate optimize_single(const Curve& curve, double a, double b,
                             const OptimizerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Interval dom = curve.domain();
  if (!(a < b) || a < dom.lo || b > dom.hi) {
    throw DomainError("optimization interval must satisfy a0 <= a < b <= b0");
  }
  const double delta = cfg.delta;
  const double norm = gamma_factor(cfg.alpha);
  const int start_intervals =
      std::max(1, static_cast<int>(std::ceil((b - a) / (delta / 4.0) - 1e-9)));

  SubdivisionState state(curve, a, b, cfg.alpha, start_intervals);
  if (!std::isfinite(state.total())) throw NumericError("non-finite sigma^alpha");
  Rng rng(seed);

  std::vector<Shifted> shifted;
  std::vector<Inserted> inserted;
  std::vector<RemovedRun> runs;
  std::vector<std::size_t> removed;

  MassEstimate est;
  est.delta = delta;
  est.alpha = cfg.alpha;
  est.a = a;
  est.b = b;
  est.seed = seed;
  est.degenerate = delta >= b - a;
  est.trace.push_back({0.0, state.total() / norm});

  const double insert_floor = cfg.insert_floor_fraction * delta;
  double normalized = 0.0;
  double next_mark = 1.0;
  std::uint64_t iterations = 0;

  while (normalized < cfg.max_normalized_iters) {
    ++iterations;
    normalized += 1.0 / state.intervals();

    double x = rng.uniform(a, b);
    double y = rng.uniform(a, b);
    if (x > y) std::swap(x, y);
    const auto [lo, end] = state.window(x, y);

    // P' = P ∩ [x, y] needs two points for any move to apply.
    if (end >= lo + 2) {
      const std::size_t last = end - 1;
      const double span = y - x;
      const double p_default = span > delta ? delta / span : 1.0;
      switch (rng.below(3)) {
        case 0:
          propose_shift(state, rng, lo, last, cfg.shift_probability.value_or(p_default),
                        delta, shifted);
          break;
        case 1:
          propose_remove(state, rng, lo, last, cfg.remove_probability.value_or(p_default),
                         delta, runs, removed);
          break;
        default:
          propose_insert(state, rng, lo, last, cfg.insert_probability.value_or(p_default),
                         insert_floor, inserted);
          break;
      }
    }

    if (normalized >= next_mark) {
      est.trace.push_back({normalized, state.total() / norm});
      next_mark = std::floor(normalized) + 1.0;
    }
  }

  const double total = state.recompute_total();
  if (!std::isfinite(total)) throw NumericError("non-finite sigma^alpha");
  est.value = total / norm;
  est.final_subdivision = state.params();
  est.iterations = iterations;
  est.trace.push_back({normalized, state.total() / norm});
  return est;
}

MassEstimate optimize_subdivision(const Curve& curve, double a, double b,
                                  const OptimizerConfig& cfg) {
  cfg.validate();
  MassEstimate best;
  std::vector<double> values;
  for (int r = 0; r < cfg.restarts; ++r) {
    MassEstimate run = optimize_single(curve, a, b, cfg, derive_seed(cfg.seed, r));
    values.push_back(run.value);
    if (r == 0 || run.value < best.value) {
      best = std::move(run);
      best.best_restart = r;
    }
  }
  best.restart_values = std::move(values);
  best.seed = cfg.seed;
  return best;
}

MassLimit mass(const Curve& curve, double a, double b, double alpha,
               std::span<const double> delta_schedule, const OptimizerConfig& cfg) {
  if (delta_schedule.empty()) throw ArgumentError("delta schedule is empty");
  for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
    if (!(delta_schedule[i] > 0.0)) throw ArgumentError("deltas must be positive");
    if (i > 0 && !(delta_schedule[i] < delta_schedule[i - 1])) {
      throw ArgumentError("delta schedule must be strictly decreasing");
    }
  }
  MassLimit out;
  for (std::size_t i = 0; i < delta_schedule.size(); ++i) {
    OptimizerConfig c = cfg;
    c.alpha = alpha;
    c.delta = delta_schedule[i];
    c.seed = derive_seed(cfg.seed, 1000 + i);
    out.deltas.push_back(c.delta);
    out.values.push_back(optimize_subdivision(curve, a, b, c).value);
  }

  const auto [mn, mx] = std::minmax_element(out.values.begin(), out.values.end());
  out.spread = *mn > 0.0 ? (*mx - *mn) / *mn : std::numeric_limits<double>::infinity();

  const std::size_t n = out.values.size();
  bool increasing = n >= 2;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(out.values[i] > out.values[i - 1])) increasing = false;
    // 2% allowance for Monte Carlo noise
    if (out.values[i] > out.values[i - 1] * 1.02) out.non_increasing_toward_limit = false;
  }
  if (n >= 2) {
    double mx_ = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx_ += std::log(out.deltas[i]);
      my += std::log(out.values[i]);
    }
    mx_ /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = std::log(out.deltas[i]) - mx_;
      sxy += dx * (std::log(out.values[i]) - my);
      sxx += dx * dx;
    }
    out.log_slope = sxy / sxx;
  }
  // Power-law growth of more than 7% per halving of delta, sustained over at
  // least three scales.
  constexpr double kGrowthPerHalving = 0.07;
  const double growth = std::pow(2.0, -out.log_slope) - 1.0;
  out.diverged = n >= 3 && increasing && growth > kGrowthPerHalving;
  out.value = out.diverged ? std::numeric_limits<double>::infinity() : out.values.back();
  return out;
}

CurveTransform CurveTransform::translate(Point v) {
  CurveTransform t;
  t.kind = TransformKind::translate;
  t.translation = std::move(v);
  return t;
}

CurveTransform CurveTransform::scale(double lambda) {
  CurveTransform t;
  t.kind = TransformKind::scale;
  t.factor = lambda;
  return t;
}

CurveTransform CurveTransform::rotate(double angle) {
  CurveTransform t;
  t.kind = TransformKind::rotate;
  t.angle = angle;
  return t;
}

Curve CurveTransform::apply(const Curve& curve) const {
  switch (kind) {
    case TransformKind::translate: return curve.translated(translation);
    case TransformKind::scale: return curve.scaled(factor);
    case TransformKind::rotate: return curve.rotated(angle);
  }
  throw ArgumentError("unknown transform");
}

double CurveTransform::expected_ratio(double alpha) const {
  return kind == TransformKind::scale ? std::pow(factor, alpha) : 1.0;
}

InvarianceReport invariance_check(const Curve& curve, const CurveTransform& transform,
                                  const OptimizerConfig& cfg) {
  const Curve moved = transform.apply(curve);
  const Interval dom = curve.domain();
  InvarianceReport r;
  r.mass_before = optimize_subdivision(curve, dom.lo, dom.hi, cfg).value;
  r.mass_after = optimize_subdivision(moved, dom.lo, dom.hi, cfg).value;
  if (r.mass_before == 0.0) throw NumericError("zero reference mass");
  r.ratio = r.mass_after / r.mass_before;
  r.expected_ratio = transform.expected_ratio(cfg.alpha);
  r.relative_error = std::abs(r.ratio - r.expected_ratio) / r.expected_ratio;
  return r;
}

}  // namespace fcalc
