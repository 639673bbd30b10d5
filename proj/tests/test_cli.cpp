#include "cli.hpp"

#include "fractal_calc/serialize.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using fcalc::Json;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = fcalc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json result_of(const Run& r) {
  REQUIRE(r.code == 0);
  return Json::parse(r.out).at("result");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One Koch staircase shared by the calculus commands below.
fs::path cache_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "fcalc_cli_test_cache";
    fs::remove_all(d);
    ::setenv("FRACTAL_CALC_CACHE_DIR", d.c_str(), 1);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("mass of the unit line") {
  const Run r = run({"mass", "line", "--alpha", "1", "--delta", "0.1"});
  CHECK(r.err.empty());
  const Json doc = Json::parse(r.out);
  CHECK(doc["result"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["tool"]["name"] == "fractal_calc");
  CHECK(doc["seed"] == 0);
  CHECK(doc["curve_hash"].get<std::string>().size() == 16);
  CHECK(doc["config"]["optimizer"]["delta"] == 0.1);
  CHECK(doc["config"]["optimizer"]["restarts"] == 3);
}

TEST_CASE("identical invocations give identical bytes") {
  const std::vector<std::string> args{"mass", "koch", "--alpha", "ln4/ln3", "--delta", "0.1",
                                      "--restarts", "1", "--seed", "17"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const double g = result_of(a)["gamma_scaled_value"].get<double>();
  CHECK(g > 0.45);
  CHECK(g < 0.52);
}

TEST_CASE("usage errors exit with 2 and a JSON message") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus"},
           {"mass", "koch", "--delta", "-1"},
           {"mass", "koch", "--unknown"},
           {"mass", "no_such_curve.json"},
           {"mass", "weierstrass"},
           {"mass", "koch", "--alpha", "1 +"},
           {"mass", "koch", "--alpha", "0.5"},
           {"mass", "koch", "--format", "xml"},
           {"differentiate", "line", "--alpha", "1", "--expr", "t"},
       }) {
    const Run r = run(args);
    CAPTURE(r.err);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    const Json e = Json::parse(r.err);
    CHECK(e["error"]["type"] == "usage");
  }
}

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  const Run v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find('.') != std::string::npos);
}

TEST_CASE("calculus on the line") {
  const Json i = result_of(run({"integrate", "line", "--expr", "t^2", "--a", "0", "--b", "1"}));
  CHECK(i["value"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  const Json d = result_of(run({"differentiate", "line", "--expr", "t^2", "--t", "0.5"}));
  CHECK(d["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  const Json x = result_of(run({"integrate", "line", "--expr", "x + y"}));
  CHECK(x["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("curve files") {
  const fs::path dir = fs::temp_directory_path() / "fcalc_cli_curve";
  fs::create_directories(dir);
  const fs::path file = dir / "segment.json";
  std::ofstream(file) << R"({"kind": "line_segment", "from": [0, 0], "to": [3, 4]})";
  const Json m = result_of(run({"mass", file.string(), "--alpha", "1", "--delta", "0.2"}));
  CHECK(m["value"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));
  std::ofstream(dir / "broken.json") << "{";
  CHECK(run({"mass", (dir / "broken.json").string(), "--alpha", "1"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("CSV output files carry a metadata sidecar") {
  const fs::path dir = fs::temp_directory_path() / "fcalc_cli_csv";
  fs::create_directories(dir);
  const fs::path out = dir / "trace.csv";
  const Run r = run({"mass", "line", "--alpha", "1", "--delta", "0.25", "--restarts", "1",
                     "--format", "csv", "--out", out.string(), "--subdivision-out",
                     (dir / "sub.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const std::string body = slurp(out);
  CHECK(body.rfind("N_prime,sigma\r\n", 0) == 0);
  const Json meta = Json::parse(slurp(dir / "trace.csv.meta.json"));
  CHECK(meta["command"] == "mass");
  CHECK(meta["output"] == "trace.csv");
  CHECK(slurp(dir / "sub.csv").rfind("t,w_x,w_y\r\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("koch examples through the staircase cache") {
  const fs::path dir = cache_dir();
  const Json one = result_of(run({"integrate", "koch", "--expr", "1", "--a", "0", "--b", "1"}));
  const double total = one["rise"]["total"].get<double>();
  CHECK(one["value"].get<double>() == doctest::Approx(total).epsilon(1e-12));
  const double g = total * std::tgamma(std::log(4.0) / std::log(3.0) + 1.0);
  CHECK(g > 0.45);
  CHECK(g < 0.51);
  // the first call filled the cache
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);

  const Json s = result_of(run({"integrate", "koch", "--expr", "S"}));
  CHECK(s["value"].get<double>() == doctest::Approx(total * total / 2.0).epsilon(1e-6));
  const Json d = result_of(run({"differentiate", "koch", "--expr", "7", "--t", "0.5"}));
  CHECK(d["value"].get<double>() == 0.0);

  const Run c1 = run({"staircase", "koch"});
  const Run c2 = run({"staircase", "koch"});
  CHECK(c1.out == c2.out);
  CHECK(c1.out.rfind("t,S\r\n", 0) == 0);

  const Json taylor = result_of(
      run({"taylor", "koch", "--expr", "exp(S)", "--t0", "0.5", "--t", "0.75", "--order", "5"}));
  CHECK(std::fabs(taylor["residual"].get<double>()) < 1e-5);

  const Run absorb = run({"absorb", "koch", "--kappa", "2", "--format", "json"});
  const Json a = result_of(absorb);
  CHECK(a["profile"].size() == 64);
  CHECK(a["ode"]["passed"] == true);
  CHECK(a["stretched_exponential"]["rise_slope"].get<double>() == doctest::Approx(-2.0));
  const Run csv = run({"absorb", "koch"});
  CHECK(csv.out.rfind("t,S_t,distance_from_origin,rho\r\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("invariance under scaling") {
  const Json r = result_of(run({"invariance", "koch", "--transform", "scale", "--factor", "2",
                                "--delta", "0.1", "--restarts", "1"}));
  CHECK(r["relative_error"].get<double>() < 1e-9);
  const Run bad = run({"invariance", "koch", "--transform", "translate", "--offset", "1"});
  CHECK(bad.code == 2);
}

TEST_CASE("dimension of a rectifiable curve") {
  const Json r = result_of(run({"dimension", "line", "--repeats", "1"}));
  CHECK(r["alpha0"] == 1.0);
  CHECK(r["lower_end_hit"] == true);
}
