#include "fractal_calc/staircase.hpp"

#include "fractal_calc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fcalc {

StaircaseTable::StaircaseTable(double alpha, std::vector<double> params,
                               std::vector<double> values, double origin)
    : alpha_(alpha), origin_(origin), params_(std::move(params)), values_(std::move(values)) {
  if (params_.size() < 2 || params_.size() != values_.size()) {
    throw ArgumentError("staircase needs matching grids of at least two points");
  }
  for (std::size_t i = 1; i < params_.size(); ++i) {
    if (!(params_[i] > params_[i - 1])) {
      throw ArgumentError("staircase grid must be strictly increasing");
    }
    if (values_[i] < values_[i - 1]) {
      throw ArgumentError("staircase values must be non-decreasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("non-finite staircase value");
  }
}

bool StaircaseTable::strictly_increasing() const {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] > values_[i - 1])) return false;
  }
  return true;
}

StaircaseTable StaircaseTable::with_origin(double origin) const {
  const double shift = staircase_eval(*this, origin);
  std::vector<double> shifted(values_);
  for (double& v : shifted) v -= shift;
  StaircaseTable t(alpha_, params_, std::move(shifted), origin);
  t.delta = delta;
  t.seed = seed;
  t.segment_masses = segment_masses;
  return t;
}

StaircaseTable staircase(const Curve& curve, double alpha, int grid_size,
                         const OptimizerConfig& cfg) {
  if (grid_size < 2) throw ArgumentError("staircase grid_size must be >= 2");
  const Interval dom = curve.domain();
  std::vector<double> grid(grid_size + 1);
  for (int k = 0; k <= grid_size; ++k) grid[k] = dom.lo + dom.width() * k / grid_size;
  grid.back() = dom.hi;

  std::vector<double> values(grid_size + 1, 0.0);
  std::vector<double> masses(grid_size);
  OptimizerConfig seg = cfg;
  seg.alpha = alpha;
  for (int k = 0; k < grid_size; ++k) {
    seg.seed = derive_seed(cfg.seed, 0x5EC0000ULL + static_cast<std::uint64_t>(k));
    const double m = optimize_subdivision(curve, grid[k], grid[k + 1], seg).value;
    if (!std::isfinite(m)) {
      throw NumericError("non-finite mass on staircase segment " + std::to_string(k) +
                         " [" + std::to_string(grid[k]) + ", " +
                         std::to_string(grid[k + 1]) + "]");
    }
    masses[k] = m;
    values[k + 1] = values[k] + m;
  }
  StaircaseTable table(alpha, std::move(grid), std::move(values), dom.lo);
  table.delta = cfg.delta;
  table.seed = cfg.seed;
  table.segment_masses = std::move(masses);
  return table;
}

double staircase_eval(const StaircaseTable& table, double t) {
  const auto p = table.params();
  const auto v = table.values();
  if (!(t >= p.front() && t <= p.back())) {
    throw DomainError("staircase_eval: t = " + std::to_string(t) + " outside domain");
  }
  const auto it = std::upper_bound(p.begin(), p.end(), t);
  if (it == p.end()) return v.back();
  const auto k = static_cast<std::size_t>(it - p.begin()) - 1;
  const double f = (t - p[k]) / (p[k + 1] - p[k]);
  return v[k] + f * (v[k + 1] - v[k]);
}

double staircase_inverse(const StaircaseTable& table, double s) {
  const auto p = table.params();
  const auto v = table.values();
  const double slack = 1e-12 * std::max(1.0, std::abs(v.back() - v.front()));
  if (!(s >= v.front() - slack && s <= v.back() + slack)) {
    throw DomainError("staircase_inverse: s = " + std::to_string(s) + " outside range");
  }
  s = std::clamp(s, v.front(), v.back());
  // first cell whose upper value reaches s
  const auto it = std::lower_bound(v.begin() + 1, v.end(), s);
  const auto k = static_cast<std::size_t>(it - v.begin()) - 1;
  const double rise = v[k + 1] - v[k];
  if (rise <= 0.0) return p[k];
  const double f = (s - v[k]) / rise;
  return p[k] + f * (p[k + 1] - p[k]);
}

LogLogFit rise_distance_fit(const Curve& curve, const StaircaseTable& table) {
  const auto p = table.params();
  const Point origin = curve.evaluate(p.front());
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 1; k < p.size(); ++k) {
    const double r = (curve.evaluate(p[k]) - origin).norm();
    const double s = staircase_eval(table, p[k]) - staircase_eval(table, p.front());
    if (r > 0.0 && s > 0.0) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(s));
    }
  }
  LogLogFit fit;
  fit.points = static_cast<int>(xs.size());
  if (xs.size() < 2) throw NumericError("too few points for the rise-distance fit");
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd dx = x.array() - x.mean();
  fit.slope = dx.dot(y.array().matrix() - Eigen::VectorXd::Constant(y.size(), y.mean())) /
              dx.squaredNorm();
  fit.intercept = y.mean() - fit.slope * x.mean();
  return fit;
}

}  // namespace fcalc
