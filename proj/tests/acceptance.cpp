// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Slow (several minutes on one core); the dimension search dominates.

#include "cli.hpp"

#include "fractal_calc/absorption.hpp"
#include "fractal_calc/calculus.hpp"
#include "fractal_calc/dimension.hpp"
#include "fractal_calc/mass.hpp"
#include "fractal_calc/serialize.hpp"
#include "fractal_calc/staircase.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace fcalc;

namespace {

namespace fs = std::filesystem;

const double kKochDim = std::log(4.0) / std::log(3.0);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CliRun {
  int code;
  std::string out;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, code == 0 ? out.str() : err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OptimizerConfig config(double alpha, double delta, int restarts, std::uint64_t seed = 0) {
  OptimizerConfig cfg;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.restarts = restarts;
  cfg.seed = seed;
  return cfg;
}

// the same staircase the CLI builds by default
const StaircaseTable& koch_staircase() {
  static const StaircaseTable t =
      staircase(von_koch(), kKochDim, 16, config(kKochDim, 1.0 / 128, 1));
  return t;
}

}  // namespace

int main() {
  const Curve koch = von_koch();

  criterion(1, "von Koch mass at delta 0.05", [&](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const CliRun r = run_cli({"mass", "koch", "--alpha", "ln4/ln3", "--delta", "0.05"});
    const double secs = elapsed_since(t0);
    o.require(r.code == 0, "exit " + std::to_string(r.code));
    if (r.code != 0) return;
    const Json res = Json::parse(r.out).at("result");
    const double g = res.at("gamma_scaled_value").get<double>();
    o.require(res.at("restart_values").size() == 3, "3 restarts");
    o.require(g >= 0.45 && g <= 0.51, "Gamma*mass = " + num(g) + " in [0.45, 0.51]");
    o.require(secs <= 120.0, "runtime " + num(secs) + " s <= 120 s");
  });

  criterion(2, "von Koch gamma-dimension", [&](Outcome& o) {
    const double exact = self_similar_dimension(4, 3);
    o.require(std::fabs(exact - kKochDim) <= 1e-12, "log4/log3 exact");
    const auto t0 = std::chrono::steady_clock::now();
    const DimensionEstimate est = estimate_dimension(koch, 0.02, config(1.0, 0.05, 1));
    const double secs = elapsed_since(t0);
    o.require(std::fabs(est.alpha0 - 1.2619) <= 0.02, "alpha0 = " + num(est.alpha0));
    o.require(secs <= 900.0, "runtime " + num(secs) + " s <= 900 s");
  });

  criterion(3, "scaling, translation, rotation", [&](Outcome& o) {
    const auto cfg = config(kKochDim, 0.05, 3, 3);
    const auto s = invariance_check(koch, CurveTransform::scale(2.0), cfg);
    o.require(s.relative_error <= 0.02, "scale ratio " + num(s.ratio) + " vs " +
                                            num(s.expected_ratio));
    const auto t = invariance_check(koch, CurveTransform::translate(make_point({3.0, -2.0})), cfg);
    o.require(t.relative_error <= 0.02, "translate ratio " + num(t.ratio));
    const auto r = invariance_check(koch, CurveTransform::rotate(1.0), cfg);
    o.require(r.relative_error <= 0.02, "rotate ratio " + num(r.ratio));
  });

  criterion(4, "delta-independence at the dimension only", [&](Outcome& o) {
    const double coarse = optimize_subdivision(koch, 0.0, 1.0, config(kKochDim, 0.05, 3)).value;
    const double fine = optimize_subdivision(koch, 0.0, 1.0, config(kKochDim, 0.0125, 3)).value;
    const double rel = std::fabs(fine - coarse) / std::min(fine, coarse);
    o.require(rel <= 0.05, "alpha0 values differ by " + num(100.0 * rel) + "%");
    const double r1 = ratio_R(koch, 1.0, 0.0125, 0.05, config(1.0, 0.05, 1));
    o.require(r1 > 1.2, "R(1.0) = " + num(r1) + " > 1.2");
    const double r18 = ratio_R(koch, 1.8, 0.0125, 0.05, config(1.8, 0.05, 1));
    o.require(r18 < 0.8, "R(1.8) = " + num(r18) + " < 0.8");
  });

  criterion(5, "unit line at alpha 1 is ordinary calculus", [&](Outcome& o) {
    const StaircaseTable line = staircase(unit_line(), 1.0, 16, config(1.0, 1.0 / 128, 1));
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double t = k / 1000.0;
      worst = std::max(worst, std::fabs(staircase_eval(line, t) - t));
    }
    o.require(worst <= 1e-9, "max |S(t) - t| = " + num(worst));
    const CurveFunction sq([](double t) { return t * t; });
    const double integral = falpha_integrate(sq, line, 0.0, 1.0, 1e-6).value;
    o.require(std::fabs(integral - 1.0 / 3.0) <= 1e-6, "integral t^2 = " + num(integral));
    const double deriv = falpha_derivative(sq, line, 0.5, default_derivative_step(line)).value;
    o.require(std::fabs(deriv - 1.0) <= 1e-6, "derivative t^2 at 0.5 = " + num(deriv));
  });

  criterion(6, "conjugacy with ordinary quadrature", [&](Outcome& o) {
    const StaircaseTable& tab = koch_staircase();
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> freq(1.0, 12.0);
    std::uniform_real_distribution<double> cut(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng), k = freq(rng), p = coef(rng);
      double a = cut(rng), b = cut(rng);
      if (a > b) std::swap(a, b);
      const auto g = [=](double u) { return c0 + c1 * std::cos(k * u + p) + c2 * std::exp(-u); };
      // evaluated through S(t) only; the integrator never sees g directly
      const CurveFunction f([g, &tab](double t) { return g(staircase_eval(tab, t)); });
      const double value = falpha_integrate(f, tab, a, b, 1e-6).value;
      const double oracle =
          testing::quadrature(g, staircase_eval(tab, a), staircase_eval(tab, b));
      worst = std::max(worst, std::fabs(value - oracle) / std::max(std::fabs(oracle), 1e-3));
    }
    const double secs = elapsed_since(t0);
    o.require(worst <= 1e-4, "worst relative difference " + num(worst));
    o.require(secs <= 60.0, "suite " + num(secs) + " s <= 60 s");
  });

  criterion(7, "fundamental theorems on von Koch", [&](Outcome& o) {
    const StaircaseTable& tab = koch_staircase();
    const std::pair<const char*, ScalarFunction> cases[] = {
        {"1", [](double) { return 1.0; }},
        {"S", [](double u) { return u; }},
        {"sin(S)", [](double u) { return std::sin(u); }},
    };
    for (const auto& [name, g] : cases) {
      const RoundtripReport r =
          fundamental_roundtrip(CurveFunction::of_rise(tab, g), tab, 0.0, 1.0, 1e-6);
      const double worst =
          std::max(r.integral_then_derivative_relative, r.derivative_then_integral_relative);
      o.require(worst <= 1e-3, std::string(name) + ": " + num(worst));
    }
  });

  criterion(8, "absorption along von Koch", [&](Outcome& o) {
    const StaircaseTable& tab = koch_staircase();
    const auto grid = uniform_grid(koch.domain(), 64);
    for (double kappa : {0.5, 1.0, 2.0}) {
      const AbsorptionModel model{kappa, 1.0, koch, tab};
      const OdeReport ode = verify_absorption_ode(model, grid, 1e-3);
      const auto fit = stretched_exponential_fit(model, grid);
      o.require(ode.max_residual <= 1e-3 * kappa * model.rho0,
                "kappa " + num(kappa) + " residual " + num(ode.max_residual));
      o.require(std::fabs(fit.rise_slope + kappa) <= 1e-9 && fit.rise_max_deviation <= 1e-9,
                "log rho vs S slope " + num(fit.rise_slope));
    }
    const LogLogFit rd = rise_distance_fit(koch, tab);
    o.require(std::fabs(rd.slope / kKochDim - 1.0) <= 0.1,
              "distance-rise slope " + num(rd.slope) + " vs alpha " + num(kKochDim));
  });

  criterion(9, "re-parametrization t -> t^2", [&](Outcome& o) {
    const auto cfg = config(kKochDim, 0.05, 3, 9);
    const double plain = optimize_subdivision(koch, 0.0, 1.0, cfg).value;
    const double warped = optimize_subdivision(koch.reparametrized(2.0), 0.0, 1.0, cfg).value;
    const double rel = std::fabs(warped - plain) / plain;
    o.require(rel <= 0.03, "masses " + num(plain) + " and " + num(warped) + " differ by " +
                               num(100.0 * rel) + "%");
  });

  criterion(10, "byte-identical reruns", [&](Outcome& o) {
    const fs::path dir = fs::temp_directory_path() / "fcalc_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> commands{
        {"mass", "koch", "--alpha", "ln4/ln3", "--delta", "0.05", "--seed", "5"},
        {"staircase", "koch", "--grid", "16"},
        {"absorb", "koch", "--kappa", "1"},
        // x is only Hoelder in the rise, so its gap closes slowly
        {"integrate", "koch", "--expr", "sin(S) + x", "--tol", "1e-4"},
    };
    for (const auto& base : commands) {
      std::string first;
      for (int rep = 0; rep < 2; ++rep) {
        auto args = base;
        const fs::path out = dir / (base[0] + std::to_string(rep));
        args.insert(args.end(), {"--out", out.string()});
        const CliRun r = run_cli(args);
        if (r.code != 0) {
          o.require(false, base[0] + " exit " + std::to_string(r.code));
          break;
        }
        if (rep == 0) first = slurp(out);
        else o.require(!first.empty() && slurp(out) == first, base[0] + " identical");
      }
    }
    fs::remove_all(dir);
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
