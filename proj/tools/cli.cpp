#include "cli.hpp"

#include "fractal_calc/absorption.hpp"
#include "fractal_calc/calculus.hpp"
#include "fractal_calc/curve.hpp"
#include "fractal_calc/dimension.hpp"
#include "fractal_calc/errors.hpp"
#include "fractal_calc/expression.hpp"
#include "fractal_calc/mass.hpp"
#include "fractal_calc/serialize.hpp"
#include "fractal_calc/staircase.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#ifndef FRACTAL_CALC_VERSION
#define FRACTAL_CALC_VERSION "0.0.0"
#endif

namespace fcalc::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurveSource {
  Curve curve;
  // known critical exponent of a built-in, used when --alpha is omitted
  std::optional<std::string> default_alpha;
};

CurveSource load_curve(const std::string& ref) {
  if (ref == "koch") return {von_koch(), "log(4)/log(3)"};
  if (ref == "line") return {unit_line(), "1"};
  if (ref == "minkowski") return {minkowski_sausage(), "1.5"};
  if (ref == "weierstrass") return {weierstrass_graph(), std::nullopt};
  std::ifstream in(ref);
  if (!in) {
    throw UsageError("curve \"" + ref + "\" is neither a built-in name nor a readable file");
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("cannot parse curve file \"" + ref + "\": " + e.what());
  }
  try {
    return {curve_from_json(j), std::nullopt};
  } catch (const Json::exception& e) {
    throw UsageError("malformed curve file \"" + ref + "\": " + e.what());
  }
}

struct Options {
  std::string curve;
  std::string alpha;
  std::uint64_t seed = 0;
  int restarts = 0;  // 0 selects the command default
  double iters = 2000.0;
  std::string format;
  std::string out;

  std::optional<double> delta;
  std::optional<double> a;
  std::optional<double> b;
  std::string trace_out;
  std::string subdivision_out;

  int grid = 16;
  int staircase_grid = 16;

  double tol = 0.0;
  double delta_fine = 0.0125;
  double delta_coarse = 0.05;
  int repeats = 3;

  std::string expr;
  std::optional<double> t;
  std::optional<double> t0;
  std::optional<double> h;
  int order = 5;
  int nodes = 15;

  double kappa = 1.0;
  double rho0 = 1.0;
  int points = 64;

  std::string transform = "scale";
  double factor = 2.0;
  std::string angle = "pi/3";
  std::vector<double> offset;
};

// Everything a command needs after parsing.
struct Context {
  const Options& opt;
  std::string command;
  Curve curve;
  std::optional<std::string> default_alpha;
  Json config = Json::object();
  std::ostream& out;

  double alpha() {
    std::string text = opt.alpha;
    if (text.empty()) {
      if (!default_alpha) throw UsageError("--alpha is required for this curve");
      text = *default_alpha;
    }
    const double value = evaluate_constant(text);
    config["alpha"] = value;
    config["alpha_expr"] = text;
    return value;
  }

  int restarts(int fallback) const { return opt.restarts > 0 ? opt.restarts : fallback; }

  OptimizerConfig optimizer(double alpha, double delta, int default_restarts) {
    OptimizerConfig cfg;
    cfg.alpha = alpha;
    cfg.delta = delta;
    cfg.seed = opt.seed;
    cfg.restarts = restarts(default_restarts);
    cfg.max_normalized_iters = opt.iters;
    cfg.validate();
    return cfg;
  }

  std::string format(const char* fallback) {
    const std::string f = opt.format.empty() ? fallback : opt.format;
    config["format"] = f;
    return f;
  }

  Json envelope() const {
    return Json{{"tool", {{"name", "fractal_calc"}, {"version", FRACTAL_CALC_VERSION}}},
                {"command", command},
                {"curve_source", opt.curve},
                {"curve", curve_to_json(curve)},
                {"curve_hash", hex64(curve_hash(curve))},
                {"seed", opt.seed},
                {"config", config}};
  }

  void emit_json(const Json& result) {
    Json doc = envelope();
    doc["result"] = result;
    write_primary(doc.dump(2) + "\n");
  }

  // CSV bodies cannot carry metadata, so a file output gets a sidecar.
  void emit_csv(const std::string& body) {
    write_primary(body);
    if (!opt.out.empty()) {
      Json meta = envelope();
      meta["output"] = fs::path(opt.out).filename().string();
      atomic_write(opt.out + ".meta.json", meta.dump(2) + "\n");
    }
  }

  void write_primary(const std::string& text) {
    if (opt.out.empty()) {
      out << text;
    } else {
      atomic_write(opt.out, text);
    }
  }
};

StaircaseTable obtain_staircase(Context& ctx, double alpha, int grid) {
  const double delta =
      ctx.opt.delta.value_or(ctx.curve.domain().width() / (8.0 * grid));
  const OptimizerConfig cfg = ctx.optimizer(alpha, delta, 1);
  Json sc = to_json(cfg);
  sc["grid"] = grid;
  ctx.config["staircase"] = sc;

  const char* dir = std::getenv("FRACTAL_CALC_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return staircase(ctx.curve, alpha, grid, cfg);

  const Json key{{"curve_hash", hex64(curve_hash(ctx.curve))}, {"staircase", sc}};
  const fs::path path =
      fs::path(dir) / ("staircase-" + hex64(fnv1a(key.dump())) + ".json");
  if (std::ifstream in(path); in) {
    try {
      const Json cached = Json::parse(in);
      if (cached.at("key") == key) return staircase_from_json(cached.at("table"));
    } catch (const std::exception&) {
      // unreadable entries are recomputed and overwritten
    }
  }
  StaircaseTable table = staircase(ctx.curve, alpha, grid, cfg);
  fs::create_directories(dir);
  atomic_write(path, Json{{"key", key}, {"table", staircase_to_json(table)}}.dump() + "\n");
  return table;
}

CurveFunction function_from(Context& ctx, const StaircaseTable& table) {
  if (ctx.opt.expr.empty()) throw UsageError("--expr is required");
  const Expression e = Expression::parse(ctx.opt.expr);
  ctx.config["expr"] = ctx.opt.expr;
  if (!e.uses('t') && !e.uses('x') && !e.uses('y')) {
    return CurveFunction::of_rise(table, [e](double u) {
      Variables v;
      v.S = u;
      return e(v);
    });
  }
  auto shared = std::make_shared<const StaircaseTable>(table);
  return CurveFunction([e, curve = ctx.curve, shared](double t) {
    Variables v;
    v.t = t;
    v.S = staircase_eval(*shared, t);
    const Point p = curve.evaluate(t);
    v.x = p[0];
    v.y = p.size() > 1 ? p[1] : 0.0;
    return e(v);
  });
}

double required(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string(flag) + " is required");
  return *v;
}

void cmd_mass(Context& ctx) {
  const double alpha = ctx.alpha();
  const Interval d = ctx.curve.domain();
  const double a = ctx.opt.a.value_or(d.lo);
  const double b = ctx.opt.b.value_or(d.hi);
  const OptimizerConfig cfg = ctx.optimizer(alpha, ctx.opt.delta.value_or(0.05), 3);
  ctx.config["optimizer"] = to_json(cfg);
  ctx.config["interval"] = {a, b};
  const std::string format = ctx.format("json");
  const MassEstimate est = optimize_subdivision(ctx.curve, a, b, cfg);
  if (!ctx.opt.trace_out.empty()) atomic_write(ctx.opt.trace_out, trace_csv(est));
  if (!ctx.opt.subdivision_out.empty()) {
    atomic_write(ctx.opt.subdivision_out, subdivision_csv(ctx.curve, est));
  }
  if (format == "csv") {
    ctx.emit_csv(trace_csv(est));
  } else {
    ctx.emit_json(to_json(est));
  }
}

void cmd_staircase(Context& ctx) {
  const double alpha = ctx.alpha();
  const std::string format = ctx.format("csv");
  const StaircaseTable table = obtain_staircase(ctx, alpha, ctx.opt.grid);
  if (format == "csv") {
    ctx.emit_csv(staircase_csv(table));
  } else {
    ctx.emit_json(staircase_to_json(table));
  }
}

void cmd_dimension(Context& ctx) {
  DimensionOptions options;
  options.delta_fine = ctx.opt.delta_fine;
  options.delta_coarse = ctx.opt.delta_coarse;
  options.repeats = ctx.opt.repeats;
  const double tol = ctx.opt.tol > 0.0 ? ctx.opt.tol : 0.02;
  const OptimizerConfig cfg = ctx.optimizer(1.0, options.delta_coarse, 1);
  ctx.config["tol"] = tol;
  ctx.config["optimizer"] = to_json(cfg);
  ctx.config["delta_pair"] = {options.delta_fine, options.delta_coarse};
  ctx.config["repeats"] = options.repeats;
  const std::string format = ctx.format("json");
  const DimensionEstimate est = estimate_dimension(ctx.curve, tol, cfg, options);
  if (format == "csv") {
    ctx.emit_csv(ratios_csv(est));
  } else {
    ctx.emit_json(to_json(est));
  }
}

Json rise_json(const StaircaseTable& table, double a, double b) {
  return Json{{"S_a", staircase_eval(table, a)},
              {"S_b", staircase_eval(table, b)},
              {"total", table.range().width()}};
}

void cmd_integrate(Context& ctx) {
  const double alpha = ctx.alpha();
  const Interval d = ctx.curve.domain();
  const double a = ctx.opt.a.value_or(d.lo);
  const double b = ctx.opt.b.value_or(d.hi);
  const double tol = ctx.opt.tol > 0.0 ? ctx.opt.tol : 1e-6;
  ctx.config["interval"] = {a, b};
  ctx.config["tol"] = tol;
  ctx.format("json");
  const StaircaseTable table = obtain_staircase(ctx, alpha, ctx.opt.staircase_grid);
  const CurveFunction f = function_from(ctx, table);
  Json result = to_json(falpha_integrate(f, table, a, b, tol));
  result["rise"] = rise_json(table, a, b);
  ctx.emit_json(result);
}

void cmd_differentiate(Context& ctx) {
  const double alpha = ctx.alpha();
  const double t = required(ctx.opt.t, "--t");
  ctx.config["t"] = t;
  ctx.format("json");
  const StaircaseTable table = obtain_staircase(ctx, alpha, ctx.opt.staircase_grid);
  const CurveFunction f = function_from(ctx, table);
  const double h = ctx.opt.h.value_or(default_derivative_step(table));
  ctx.config["h"] = h;
  ctx.emit_json(to_json(falpha_derivative(f, table, t, h)));
}

void cmd_taylor(Context& ctx) {
  const double alpha = ctx.alpha();
  const double t = required(ctx.opt.t, "--t");
  const double t0 = required(ctx.opt.t0, "--t0");
  if (ctx.opt.order < 0 || ctx.opt.order > kMaxTaylorOrder) {
    throw UsageError("--order must lie in [0, " + std::to_string(kMaxTaylorOrder) + "]");
  }
  ctx.config["t"] = t;
  ctx.config["t0"] = t0;
  ctx.config["order"] = ctx.opt.order;
  ctx.config["chebyshev_nodes"] = ctx.opt.nodes;
  ctx.format("json");
  const StaircaseTable table = obtain_staircase(ctx, alpha, ctx.opt.staircase_grid);
  const CurveFunction f = function_from(ctx, table);
  TaylorOptions options;
  options.chebyshev_nodes = ctx.opt.nodes;
  ctx.emit_json(to_json(taylor_partial_sum(f, table, t0, t, ctx.opt.order, options)));
}

void cmd_absorb(Context& ctx) {
  const double alpha = ctx.alpha();
  ctx.config["kappa"] = ctx.opt.kappa;
  ctx.config["rho0"] = ctx.opt.rho0;
  ctx.config["grid"] = ctx.opt.points;
  const std::string format = ctx.format("csv");
  AbsorptionModel model{ctx.opt.kappa, ctx.opt.rho0, ctx.curve,
                        obtain_staircase(ctx, alpha, ctx.opt.staircase_grid)};
  model.validate();
  if (ctx.opt.points < 2) throw UsageError("--grid needs at least 2 points");
  const std::vector<double> grid = uniform_grid(ctx.curve.domain(), ctx.opt.points);
  const auto profile = absorption_profile(model, grid);
  if (format == "csv") {
    ctx.emit_csv(profile_csv(profile));
    return;
  }
  Json rows = Json::array();
  for (const auto& p : profile) {
    rows.push_back({{"t", p.t}, {"S_t", p.rise}, {"distance_from_origin", p.distance},
                    {"rho", p.rho}});
  }
  const auto fit = stretched_exponential_fit(model, grid);
  ctx.emit_json(Json{{"profile", rows},
                     {"ode", to_json(verify_absorption_ode(model, grid, 1e-3))},
                     {"stretched_exponential",
                      {{"rise_slope", fit.rise_slope},
                       {"rise_max_deviation", fit.rise_max_deviation},
                       {"distance_slope_first_half", fit.distance_slope_first_half},
                       {"distance_slope_second_half", fit.distance_slope_second_half},
                       {"distance_slope_change", fit.distance_slope_change}}}});
}

void cmd_invariance(Context& ctx) {
  const double alpha = ctx.alpha();
  CurveTransform transform;
  const std::string& kind = ctx.opt.transform;
  if (kind == "scale") {
    transform = CurveTransform::scale(ctx.opt.factor);
    ctx.config["factor"] = ctx.opt.factor;
  } else if (kind == "rotate") {
    const double angle = evaluate_constant(ctx.opt.angle);
    transform = CurveTransform::rotate(angle);
    ctx.config["angle"] = angle;
  } else {
    const int dim = ctx.curve.embedding_dim();
    if (ctx.opt.offset.size() != static_cast<std::size_t>(dim)) {
      throw UsageError("--offset needs " + std::to_string(dim) + " components");
    }
    Point v(dim);
    for (int i = 0; i < dim; ++i) v[i] = ctx.opt.offset[static_cast<std::size_t>(i)];
    transform = CurveTransform::translate(v);
    ctx.config["offset"] = ctx.opt.offset;
  }
  ctx.config["transform"] = kind;
  const OptimizerConfig cfg = ctx.optimizer(alpha, ctx.opt.delta.value_or(0.05), 3);
  ctx.config["optimizer"] = to_json(cfg);
  ctx.format("json");
  ctx.emit_json(to_json(invariance_check(ctx.curve, transform, cfg)));
}

Json error_json(const char* type, const std::string& message) {
  return Json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Calculus on fractal curves: mass, staircase, dimension, F^alpha operators",
               "fractal_calc"};
  app.set_version_flag("--version", FRACTAL_CALC_VERSION);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("curve", opt.curve, "koch, line, minkowski, weierstrass or a JSON file")
        ->required();
    sub->add_option("--alpha", opt.alpha, "exponent, a numeric expression such as ln4/ln3");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--restarts", opt.restarts, "optimizer restarts")
        ->check(CLI::PositiveNumber);
    sub->add_option("--iters", opt.iters, "normalized iteration budget N'")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", opt.out, "output file (default stdout)");
  };
  auto optimizer_delta = [&](CLI::App* sub) {
    sub->add_option("--delta", opt.delta, "mesh bound")->check(CLI::PositiveNumber);
  };
  auto staircase_opts = [&](CLI::App* sub) {
    sub->add_option("--delta", opt.delta, "mesh bound for the staircase segments")
        ->check(CLI::PositiveNumber);
    sub->add_option("--staircase-grid", opt.staircase_grid, "staircase grid segments")
        ->check(CLI::PositiveNumber);
  };
  auto interval = [&](CLI::App* sub) {
    sub->add_option("--a", opt.a, "left parameter");
    sub->add_option("--b", opt.b, "right parameter");
  };
  auto expr = [&](CLI::App* sub) {
    sub->add_option("--expr", opt.expr, "function of t, S, x, y")->required();
  };

  auto* mass = app.add_subcommand("mass", "coarse-grained mass of a curve section");
  common(mass);
  optimizer_delta(mass);
  interval(mass);
  mass->add_option("--trace-out", opt.trace_out, "write the optimizer trace CSV");
  mass->add_option("--subdivision-out", opt.subdivision_out,
                   "write the final subdivision CSV");

  auto* stair = app.add_subcommand("staircase", "tabulate the staircase function");
  common(stair);
  optimizer_delta(stair);
  stair->add_option("--grid", opt.grid, "number of grid segments")
      ->check(CLI::PositiveNumber);

  auto* dim = app.add_subcommand("dimension", "estimate the gamma-dimension by bisection");
  common(dim);
  dim->add_option("--tol", opt.tol, "bracket width")->check(CLI::PositiveNumber);
  dim->add_option("--delta-fine", opt.delta_fine)->check(CLI::PositiveNumber);
  dim->add_option("--delta-coarse", opt.delta_coarse)->check(CLI::PositiveNumber);
  dim->add_option("--repeats", opt.repeats, "seeded runs averaged per scale")
      ->check(CLI::PositiveNumber);

  auto* integ = app.add_subcommand("integrate", "F^alpha-integral of an expression");
  common(integ);
  staircase_opts(integ);
  interval(integ);
  expr(integ);
  integ->add_option("--tol", opt.tol, "upper minus lower sum")->check(CLI::PositiveNumber);

  auto* diff = app.add_subcommand("differentiate", "F^alpha-derivative of an expression");
  common(diff);
  staircase_opts(diff);
  expr(diff);
  diff->add_option("--t", opt.t, "parameter")->required();
  diff->add_option("--step", opt.h, "step in the rise variable")->check(CLI::PositiveNumber);

  auto* taylor = app.add_subcommand("taylor", "Taylor partial sum in the rise variable");
  common(taylor);
  staircase_opts(taylor);
  expr(taylor);
  taylor->add_option("--t0", opt.t0, "expansion point")->required();
  taylor->add_option("--t", opt.t, "evaluation point")->required();
  taylor->add_option("--order", opt.order, "highest derivative order");
  taylor->add_option("--nodes", opt.nodes, "Chebyshev nodes")->check(CLI::Range(2, 64));

  auto* absorb = app.add_subcommand("absorb", "absorption profile along the curve");
  common(absorb);
  staircase_opts(absorb);
  absorb->add_option("--kappa", opt.kappa, "absorption coefficient")
      ->check(CLI::NonNegativeNumber);
  absorb->add_option("--rho0", opt.rho0, "initial density")->check(CLI::PositiveNumber);
  absorb->add_option("--grid", opt.points, "profile points");

  auto* inv = app.add_subcommand("invariance", "mass ratio under a similarity");
  common(inv);
  optimizer_delta(inv);
  inv->add_option("--transform", opt.transform)
      ->check(CLI::IsMember({"scale", "translate", "rotate"}));
  inv->add_option("--factor", opt.factor, "scale factor")->check(CLI::PositiveNumber);
  inv->add_option("--angle", opt.angle, "rotation angle, a numeric expression");
  inv->add_option("--offset", opt.offset, "translation vector")->expected(1, kMaxEmbeddingDim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << FRACTAL_CALC_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    CurveSource src = load_curve(opt.curve);
    Context ctx{opt, sub->get_name(), std::move(src.curve), src.default_alpha,
                Json::object(), out};
    const std::string& name = ctx.command;
    if (name == "mass") cmd_mass(ctx);
    else if (name == "staircase") cmd_staircase(ctx);
    else if (name == "dimension") cmd_dimension(ctx);
    else if (name == "integrate") cmd_integrate(ctx);
    else if (name == "differentiate") cmd_differentiate(ctx);
    else if (name == "taylor") cmd_taylor(ctx);
    else if (name == "absorb") cmd_absorb(ctx);
    else cmd_invariance(ctx);
    return 0;
  } catch (const UsageError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    Json j = error_json("convergence", e.what());
    j["error"]["lower"] = e.lower();
    j["error"]["upper"] = e.upper();
    err << j.dump() << "\n";
    return 1;
  } catch (const BracketError& e) {
    Json j = error_json("bracket", e.what());
    j["error"]["ratio_at_low"] = e.ratio_at_low();
    j["error"]["ratio_at_high"] = e.ratio_at_high();
    err << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << error_json("computation", e.what()).dump() << "\n";
    return 1;
  }
}

}  // namespace fcalc::cli
