#include "fractal_calc/absorption.hpp"

#include "fractal_calc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_deviation = 0.0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 2) throw NumericError("line fit needs at least two points");
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd dx = (x.array() - x.mean()).matrix();
  const Eigen::VectorXd dy = (y.array() - y.mean()).matrix();
  LineFit fit;
  fit.slope = dx.dot(dy) / dx.squaredNorm();
  fit.intercept = y.mean() - fit.slope * x.mean();
  fit.max_deviation =
      (y.array() - (fit.intercept + fit.slope * x.array())).abs().maxCoeff();
  return fit;
}

}  // namespace

void AbsorptionModel::validate() const {
  // kappa = 0 is admitted as the constant-profile limit
  if (!(kappa >= 0.0)) throw ArgumentError("absorption coefficient must be >= 0");
  if (!(rho0 >= 0.0)) throw ArgumentError("initial density must be >= 0");
}

double AbsorptionModel::density(double t) const {
  return rho0 * std::exp(-kappa * staircase_eval(table, t));
}

CurveFunction AbsorptionModel::density_function() const {
  const double k = kappa;
  const double r0 = rho0;
  return CurveFunction::of_rise(table, [k, r0](double u) { return r0 * std::exp(-k * u); });
}

std::vector<double> uniform_grid(Interval domain, int points) {
  if (points < 2) throw ArgumentError("grid needs at least two points");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = domain.lo + domain.width() * i / (points - 1);
  grid.back() = domain.hi;
  return grid;
}

std::vector<ProfilePoint> absorption_profile(const AbsorptionModel& model,
                                             std::span<const double> grid) {
  model.validate();
  const Point origin = model.curve.evaluate(model.table.origin());
  std::vector<ProfilePoint> out;
  out.reserve(grid.size());
  for (double t : grid) {
    ProfilePoint p;
    p.t = t;
    p.rise = staircase_eval(model.table, t);
    p.distance = (model.curve.evaluate(t) - origin).norm();
    p.rho = model.rho0 * std::exp(-model.kappa * p.rise);
    out.push_back(p);
  }
  return out;
}

OdeReport verify_absorption_ode(const AbsorptionModel& model, std::span<const double> grid,
                                double tol, std::optional<double> step) {
  model.validate();
  if (!(tol > 0.0)) throw ArgumentError("ODE tolerance must be positive");
  const double h = step.value_or(default_derivative_step(model.table));
  const CurveFunction rho = model.density_function();
  OdeReport rep;
  for (double t : grid) {
    const double d = falpha_derivative(rho, model.table, t, h).value;
    const double residual = std::abs(d + model.kappa * rho(t));
    rep.residuals.push_back(residual);
    rep.max_residual = std::max(rep.max_residual, residual);
  }
  const double scale = (model.kappa > 0.0 ? model.kappa : 1.0) * model.rho0;
  rep.max_normalized_residual = scale > 0.0 ? rep.max_residual / scale : rep.max_residual;
  rep.passed = rep.max_normalized_residual <= tol;
  return rep;
}

StretchedExponentialFit stretched_exponential_fit(const AbsorptionModel& model,
                                                  std::span<const double> grid) {
  if (!(model.rho0 > 0.0)) throw ArgumentError("fit requires rho0 > 0");
  const auto profile = absorption_profile(model, grid);
  std::vector<double> rise;
  std::vector<double> log_rho;
  std::vector<double> dist_alpha;
  for (const auto& p : profile) {
    rise.push_back(p.rise);
    log_rho.push_back(std::log(p.rho));
    dist_alpha.push_back(std::pow(p.distance, model.table.alpha()));
  }
  StretchedExponentialFit fit;
  const LineFit by_rise = fit_line(rise, log_rho);
  fit.rise_slope = by_rise.slope;
  fit.rise_max_deviation = by_rise.max_deviation;

  const std::size_t half = profile.size() / 2;
  const std::span<const double> d(dist_alpha);
  const std::span<const double> l(log_rho);
  fit.distance_slope_first_half = fit_line(d.subspan(0, half + 1), l.subspan(0, half + 1)).slope;
  fit.distance_slope_second_half = fit_line(d.subspan(half), l.subspan(half)).slope;
  fit.distance_slope_change =
      std::abs(fit.distance_slope_second_half - fit.distance_slope_first_half) /
      std::abs(fit.distance_slope_first_half);
  return fit;
}

}  // namespace fcalc
