#include "fractal_calc/calculus.hpp"

#include "fractal_calc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace fcalc {

CurveFunction::CurveFunction(ScalarFunction rule, std::optional<ScalarFunction> conjugate)
    : rule_(std::move(rule)), conjugate_(std::move(conjugate)) {
  if (!rule_) throw ArgumentError("curve function needs an evaluation rule");
}

CurveFunction CurveFunction::constant(double k) {
  return CurveFunction([k](double) { return k; }, ScalarFunction([k](double) { return k; }));
}

CurveFunction CurveFunction::of_rise(const StaircaseTable& table, ScalarFunction g) {
  auto shared = std::make_shared<const StaircaseTable>(table);
  return CurveFunction([shared, g](double t) { return g(staircase_eval(*shared, t)); }, g);
}

CurveFunction CurveFunction::rise(const StaircaseTable& table) {
  return of_rise(table, [](double u) { return u; });
}

ConjugateFunction::ConjugateFunction(CurveFunction f, const StaircaseTable& table)
    : f_(std::move(f)),
      table_(std::make_shared<const StaircaseTable>(table)),
      range_(table.range()) {
  if (!table_->strictly_increasing()) {
    throw ArgumentError("phi requires a strictly increasing staircase");
  }
}

double ConjugateFunction::operator()(double u) const {
  return f_(staircase_inverse(*table_, u));
}

ConjugateFunction phi(const CurveFunction& f, const StaircaseTable& table) {
  return ConjugateFunction(f, table);
}

CurveFunction phi_inverse(ScalarFunction g, const StaircaseTable& table) {
  return CurveFunction::of_rise(table, std::move(g));
}

IntegralResult falpha_integrate(const CurveFunction& f, const StaircaseTable& table,
                                double a, double b, double tol,
                                const IntegrationOptions& options) {
  const Interval dom = table.domain();
  if (!(a <= b) || a < dom.lo || b > dom.hi) {
    throw DomainError("falpha_integrate requires a0 <= a <= b <= b0");
  }
  if (!(tol > 0.0)) throw ArgumentError("integration tolerance must be positive");
  if (options.subsamples < 0 || options.initial_cells < 1) {
    throw ArgumentError("invalid integration options");
  }
  IntegralResult r;
  if (a == b) {
    r.subdivision_size = 0;
    return r;
  }

  std::vector<double> nodes;
  std::vector<double> rise;
  std::vector<double> f_nodes;
  for (int cells = options.initial_cells;; cells *= 2) {
    nodes.resize(cells + 1);
    rise.resize(cells + 1);
    f_nodes.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) {
      nodes[i] = i == cells ? b : a + (b - a) * i / cells;
      rise[i] = staircase_eval(table, nodes[i]);
      f_nodes[i] = f(nodes[i]);
    }
    double upper = 0.0;
    double lower = 0.0;
    for (int i = 0; i < cells; ++i) {
      double hi = std::max(f_nodes[i], f_nodes[i + 1]);
      double lo = std::min(f_nodes[i], f_nodes[i + 1]);
      const double h = nodes[i + 1] - nodes[i];
      for (int j = 1; j <= options.subsamples; ++j) {
        const double v = f(nodes[i] + h * j / (options.subsamples + 1));
        hi = std::max(hi, v);
        lo = std::min(lo, v);
      }
      const double weight = rise[i + 1] - rise[i];
      upper += hi * weight;
      lower += lo * weight;
    }
    if (!std::isfinite(upper) || !std::isfinite(lower)) {
      throw NumericError("non-finite F^alpha-sum");
    }
    r.upper_sum = upper;
    r.lower_sum = lower;
    r.gap = upper - lower;
    r.value = 0.5 * (upper + lower);
    r.subdivision_size = cells;
    if (r.gap <= tol) return r;
    if (cells * 2 > options.max_cells) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "F^alpha-integral did not converge: gap %.3g > tol %.3g at %d cells",
                    r.gap, tol, cells);
      throw ConvergenceError(msg, lower, upper);
    }
  }
}

namespace {

double simpson_step(const ScalarFunction& g, double lo, double hi, double f_lo, double f_mid,
                    double f_hi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double rm = 0.5 * (mid + hi);
  const double f_lm = g(lm);
  const double f_rm = g(rm);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(g, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1) +
         simpson_step(g, mid, hi, f_mid, f_rm, f_hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double riemann_quadrature(const ScalarFunction& g, double lo, double hi, double tol) {
  if (lo == hi) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double f_lo = g(lo);
  const double f_mid = g(mid);
  const double f_hi = g(hi);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  return simpson_step(g, lo, hi, f_lo, f_mid, f_hi, whole, tol, 40);
}

namespace {

struct Quotient {
  double value;
  bool one_sided;
};

Quotient difference_quotient(const ScalarFunction& g, double u, double h, Interval range) {
  if (u - h >= range.lo && u + h <= range.hi) {
    return {(g(u + h) - g(u - h)) / (2.0 * h), false};
  }
  if (u + 2.0 * h <= range.hi) {
    return {(-3.0 * g(u) + 4.0 * g(u + h) - g(u + 2.0 * h)) / (2.0 * h), true};
  }
  if (u - 2.0 * h >= range.lo) {
    return {(3.0 * g(u) - 4.0 * g(u - h) + g(u - 2.0 * h)) / (2.0 * h), true};
  }
  throw DomainError("derivative step too large for the rise range");
}

}  // namespace

DerivativeResult conjugate_derivative(const ScalarFunction& g, double u, double h,
                                      Interval range) {
  if (!(h > 0.0)) throw ArgumentError("derivative step must be positive");
  if (!range.contains(u)) throw DomainError("derivative point outside the rise range");
  const Quotient full = difference_quotient(g, u, h, range);
  const Quotient half = difference_quotient(g, u, 0.5 * h, range);
  DerivativeResult r;
  r.value = full.value;
  r.richardson = half.value + (half.value - full.value) / 3.0;
  r.error_estimate = std::abs(full.value - half.value);
  r.u = u;
  r.step = h;
  r.one_sided = full.one_sided || half.one_sided;
  return r;
}

double default_derivative_step(const StaircaseTable& table) {
  return 1e-4 * table.range().width();
}

DerivativeResult falpha_derivative(const CurveFunction& f, const StaircaseTable& table,
                                   double t, double h) {
  // phi[f] without copying the table
  const ScalarFunction g = [&f, &table](double u) { return f(staircase_inverse(table, u)); };
  return conjugate_derivative(g, staircase_eval(table, t), h, table.range());
}

RoundtripReport fundamental_roundtrip(const CurveFunction& f, const StaircaseTable& table,
                                      double a, double b, double tol,
                                      const RoundtripOptions& options) {
  if (!(a < b)) throw ArgumentError("roundtrip requires a < b");
  if (options.grid_points < 1) throw ArgumentError("roundtrip needs grid points");
  const double h = options.step.value_or(default_derivative_step(table));
  const double s_a = staircase_eval(table, a);
  const double s_b = staircase_eval(table, b);

  RoundtripReport rep;
  rep.grid_points = options.grid_points;
  double scale = 0.0;
  for (int j = 0; j < options.grid_points; ++j) {
    const double t = a + (b - a) * (j + 0.5) / options.grid_points;
    scale = std::max(scale, std::abs(f(t)));
  }
  scale = std::max(scale, std::max(std::abs(f(a)), std::abs(f(b))));
  if (scale == 0.0) scale = 1.0;

  // First theorem: g1(t) = integral over C(a, t); its difference quotient in
  // the rise variable takes the numerator g1(t+) - g1(t-) by additivity.
  for (int j = 0; j < options.grid_points; ++j) {
    const double t = a + (b - a) * (j + 0.5) / options.grid_points;
    const double u = staircase_eval(table, t);
    const double t_minus = staircase_inverse(table, std::max(s_a, u - h));
    const double t_plus = staircase_inverse(table, std::min(s_b, u + h));
    const double du = staircase_eval(table, t_plus) - staircase_eval(table, t_minus);
    const double piece =
        falpha_integrate(f, table, t_minus, t_plus, tol * du * scale).value;
    const double dev = std::abs(piece / du - f(t));
    rep.integral_then_derivative = std::max(rep.integral_then_derivative, dev);
  }
  rep.integral_then_derivative_relative = rep.integral_then_derivative / scale;

  // Second theorem: the integral of D f over C(a, b) is f(b) - f(a).
  const CurveFunction df(
      [&f, &table, h](double t) { return falpha_derivative(f, table, t, h).value; });
  const double lhs = falpha_integrate(df, table, a, b, tol * scale).value;
  const double rhs = f(b) - f(a);
  rep.derivative_then_integral = std::abs(lhs - rhs);
  rep.derivative_then_integral_relative =
      rep.derivative_then_integral / std::max(std::abs(rhs), scale);
  return rep;
}

namespace {

// Chebyshev interpolant of g on [lo, hi]; derivatives are taken on the
// coefficient series.
class ChebyshevSeries {
 public:
  ChebyshevSeries(const ScalarFunction& g, double lo, double hi, int nodes)
      : lo_(lo), hi_(hi), coeffs_(Eigen::VectorXd::Zero(nodes)) {
    Eigen::VectorXd values(nodes);
    for (int k = 0; k < nodes; ++k) {
      const double x = std::cos(std::numbers::pi * (k + 0.5) / nodes);
      values[k] = g(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
    }
    for (int j = 0; j < nodes; ++j) {
      double s = 0.0;
      for (int k = 0; k < nodes; ++k) {
        s += values[k] * std::cos(std::numbers::pi * j * (k + 0.5) / nodes);
      }
      coeffs_[j] = 2.0 * s / nodes;
    }
    coeffs_[0] *= 0.5;
  }

  // n-th derivative at u.
  double derivative(int n, double u) const {
    Eigen::VectorXd c = coeffs_;
    for (int d = 0; d < n; ++d) c = differentiate(c);
    const double x = (2.0 * u - lo_ - hi_) / (hi_ - lo_);
    return clenshaw(c, x) * std::pow(2.0 / (hi_ - lo_), n);
  }

 private:
  static Eigen::VectorXd differentiate(const Eigen::VectorXd& c) {
    const Eigen::Index n = c.size();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    if (n < 2) return d;
    for (Eigen::Index j = n - 1; j >= 1; --j) {
      d[j - 1] = (j + 1 < n ? d[j + 1] : 0.0) + 2.0 * j * c[j];
    }
    d[0] *= 0.5;
    return d;
  }

  static double clenshaw(const Eigen::VectorXd& c, double x) {
    double b1 = 0.0;
    double b2 = 0.0;
    for (Eigen::Index j = c.size() - 1; j >= 1; --j) {
      const double b0 = 2.0 * x * b1 - b2 + c[j];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }

  double lo_;
  double hi_;
  Eigen::VectorXd coeffs_;
};

}  // namespace

TaylorResult taylor_partial_sum(const CurveFunction& f, const StaircaseTable& table,
                                double t_center, double t_eval, int order,
                                const TaylorOptions& options) {
  if (order < 0 || order > kMaxTaylorOrder) {
    throw ArgumentError("Taylor order must lie in [0, " + std::to_string(kMaxTaylorOrder) +
                        "]");
  }
  if (options.chebyshev_nodes < order + 2) {
    throw ArgumentError("too few Chebyshev nodes for the requested order");
  }
  const ConjugateFunction g = phi(f, table);
  const Interval range = g.range();
  TaylorResult r;
  r.u_center = staircase_eval(table, t_center);
  r.u_eval = staircase_eval(table, t_eval);
  r.target = f(t_eval);

  const double half_width = options.window_fraction * range.width();
  const double lo = std::max(range.lo, r.u_center - half_width);
  const double hi = std::min(range.hi, r.u_center + half_width);
  if (!(hi > lo)) throw NumericError("empty Taylor fitting window");
  const ChebyshevSeries series(g, lo, hi, options.chebyshev_nodes);

  const double du = r.u_eval - r.u_center;
  double power = 1.0;
  double factorial = 1.0;
  for (int n = 0; n <= order; ++n) {
    const double dn = n == 0 ? g(r.u_center) : series.derivative(n, r.u_center);
    r.derivatives.push_back(dn);
    if (n > 0) {
      power *= du;
      factorial *= n;
    }
    r.value += power / factorial * dn;
  }
  r.residual = r.value - r.target;
  return r;
}

double np_norm(const CurveFunction& f, const StaircaseTable& table, double p, double tol) {
  if (!(p >= 1.0)) throw ArgumentError("N_p norm requires p >= 1");
  const CurveFunction powered([&f, p](double t) { return std::pow(std::abs(f(t)), p); });
  const Interval dom = table.domain();
  const double integral = falpha_integrate(powered, table, dom.lo, dom.hi, tol).value;
  return std::pow(std::max(integral, 0.0), 1.0 / p);
}

ContinuityProbe probe_function(const CurveFunction& f, Interval domain, int samples) {
  if (samples < 2) throw ArgumentError("probe needs >= 2 samples");
  ContinuityProbe probe;
  double prev = f(domain.lo);
  probe.max_abs = std::abs(prev);
  probe.finite = std::isfinite(prev);
  for (int i = 1; i < samples; ++i) {
    const double t = domain.lo + domain.width() * i / (samples - 1);
    const double v = f(i == samples - 1 ? domain.hi : t);
    probe.finite = probe.finite && std::isfinite(v);
    probe.max_abs = std::max(probe.max_abs, std::abs(v));
    probe.max_jump = std::max(probe.max_jump, std::abs(v - prev));
    prev = v;
  }
  return probe;
}

}  // namespace fcalc
