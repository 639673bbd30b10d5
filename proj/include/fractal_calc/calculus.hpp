#pragma once

#include "fractal_calc/staircase.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace fcalc {

using ScalarFunction = std::function<double(double)>;

// A real function on the curve addressed through the parameter:
// f(t) stands for f(w(t)).
class CurveFunction {
 public:
  explicit CurveFunction(ScalarFunction rule, std::optional<ScalarFunction> conjugate = {});

  double operator()(double t) const { return rule_(t); }
  // Analytic phi[f] when known.
  const std::optional<ScalarFunction>& conjugate() const { return conjugate_; }

  static CurveFunction constant(double k);
  // f(t) = g(S(t)); the conjugate is g itself.
  static CurveFunction of_rise(const StaircaseTable& table, ScalarFunction g);
  // f(t) = S(t), i.e. J(theta).
  static CurveFunction rise(const StaircaseTable& table);

 private:
  ScalarFunction rule_;
  std::optional<ScalarFunction> conjugate_;
};

// g = phi[f] on [S(a0), S(b0)]: g(u) = f(S^{-1}(u)).
class ConjugateFunction {
 public:
  ConjugateFunction(CurveFunction f, const StaircaseTable& table);

  double operator()(double u) const;
  Interval range() const { return range_; }

 private:
  CurveFunction f_;
  std::shared_ptr<const StaircaseTable> table_;
  Interval range_;
};

ConjugateFunction phi(const CurveFunction& f, const StaircaseTable& table);
// phi^{-1}[g](t) = g(S(t)).
CurveFunction phi_inverse(ScalarFunction g, const StaircaseTable& table);

struct IntegrationOptions {
  // interior samples per cell for the sup/inf estimates (plus both ends)
  int subsamples = 16;
  int initial_cells = 16;
  int max_cells = 1 << 22;
};

struct IntegralResult {
  double value = 0.0;
  double lower_sum = 0.0;
  double upper_sum = 0.0;
  double gap = 0.0;
  int subdivision_size = 0;
};

// Upper and lower F^alpha-sums over uniform refinements of [a, b], doubled
// until U - L <= tol. Throws ConvergenceError with the last bracket when
// max_cells is reached first.
IntegralResult falpha_integrate(const CurveFunction& f, const StaircaseTable& table,
                                double a, double b, double tol,
                                const IntegrationOptions& options = {});

// Ordinary adaptive Simpson quadrature of g over [lo, hi].
double riemann_quadrature(const ScalarFunction& g, double lo, double hi, double tol);

struct DerivativeResult {
  double value = 0.0;        // difference quotient at step h
  double richardson = 0.0;   // (4 D(h/2) - D(h)) / 3
  double error_estimate = 0.0;
  double u = 0.0;
  double step = 0.0;
  bool one_sided = false;
};

// d g / du at u with step h, second-order one-sided near the ends of range.
DerivativeResult conjugate_derivative(const ScalarFunction& g, double u, double h,
                                      Interval range);

// 1e-4 (S(b0) - S(a0))
double default_derivative_step(const StaircaseTable& table);

// D_F^alpha f at w(t), a difference quotient in the rise variable u = S(t).
DerivativeResult falpha_derivative(const CurveFunction& f, const StaircaseTable& table,
                                   double t, double h);

struct RoundtripReport {
  // max |D(I f)(t) - f(t)| over the grid, absolute and relative to max |f|
  double integral_then_derivative = 0.0;
  double integral_then_derivative_relative = 0.0;
  // |I(D f) - (f(b) - f(a))|, absolute and relative
  double derivative_then_integral = 0.0;
  double derivative_then_integral_relative = 0.0;
  int grid_points = 0;
};

struct RoundtripOptions {
  int grid_points = 16;
  std::optional<double> step;
};

RoundtripReport fundamental_roundtrip(const CurveFunction& f, const StaircaseTable& table,
                                      double a, double b, double tol,
                                      const RoundtripOptions& options = {});

struct TaylorOptions {
  int chebyshev_nodes = 15;
  // half-width of the fitting window as a fraction of the rise range
  double window_fraction = 0.5;
};

struct TaylorResult {
  double value = 0.0;
  double target = 0.0;    // f(t_eval)
  double residual = 0.0;  // value - target
  double u_center = 0.0;
  double u_eval = 0.0;
  std::vector<double> derivatives;  // (D_F^alpha)^n f at the center
};

inline constexpr int kMaxTaylorOrder = 8;

// sum_{n <= order} (S(t_eval) - S(t_center))^n / n! (D_F^alpha)^n f(t_center).
TaylorResult taylor_partial_sum(const CurveFunction& f, const StaircaseTable& table,
                                double t_center, double t_eval, int order,
                                const TaylorOptions& options = {});

// (integral over the whole curve of |f|^p)^{1/p}
double np_norm(const CurveFunction& f, const StaircaseTable& table, double p,
               double tol = 1e-6);

struct ContinuityProbe {
  double max_jump = 0.0;  // max |f(t_{i+1}) - f(t_i)| on the dense grid
  double max_abs = 0.0;   // boundedness
  bool finite = true;
};

ContinuityProbe probe_function(const CurveFunction& f, Interval domain,
                               int samples = 4096);

}  // namespace fcalc
