#include "fractal_calc/serialize.hpp"

#include "fractal_calc/errors.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace fcalc {

namespace {

Json point_json(const Point& p) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) arr.push_back(p[i]);
  return arr;
}

Point point_from(const Json& j) {
  if (!j.is_array() || j.empty() || j.size() > kMaxEmbeddingDim) {
    throw ArgumentError("point must be a non-empty numeric array");
  }
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return p;
}

Interval domain_from(const Json& j, Interval fallback) {
  if (!j.contains("domain")) return fallback;
  const auto& d = j.at("domain");
  if (!d.is_array() || d.size() != 2) throw ArgumentError("domain must be [a0, b0]");
  return {d[0].get<double>(), d[1].get<double>()};
}

}  // namespace

Json curve_to_json(const Curve& curve) {
  Json j;
  j["kind"] = to_string(curve.kind());
  j["domain"] = {curve.domain().lo, curve.domain().hi};
  switch (curve.kind()) {
    case CurveKind::self_similar: {
      const auto& ss = std::get<SelfSimilarSpec>(curve.payload());
      Json tr = Json::array();
      for (const auto& t : ss.transforms) tr.push_back({{"s", t.scale}, {"theta", t.theta}});
      j["transforms"] = tr;
      j["v0"] = {ss.v0.x(), ss.v0.y()};
      j["depth"] = ss.depth;
      break;
    }
    case CurveKind::weierstrass_graph: {
      const auto& ws = std::get<WeierstrassSpec>(curve.payload());
      j["lambda"] = ws.lambda;
      j["s"] = ws.s;
      j["terms"] = ws.terms;
      j["tail_bound"] = weierstrass_tail_bound(ws);
      break;
    }
    case CurveKind::polyline: {
      Json verts = Json::array();
      for (const auto& v : std::get<PolylineSpec>(curve.payload()).vertices) {
        verts.push_back(point_json(v));
      }
      j["vertices"] = verts;
      break;
    }
    case CurveKind::line_segment: {
      const auto& ls = std::get<LineSegmentSpec>(curve.payload());
      j["from"] = point_json(ls.from);
      j["to"] = point_json(ls.to);
      break;
    }
  }
  if (curve.linear_map() || curve.offset().squaredNorm() > 0.0) {
    Json affine;
    if (curve.linear_map()) {
      Json rows = Json::array();
      const auto& m = *curve.linear_map();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
      }
      affine["linear"] = rows;
    }
    affine["offset"] = point_json(curve.offset());
    j["affine"] = affine;
  }
  if (curve.reparam_power() != 1.0) j["reparam_power"] = curve.reparam_power();
  return j;
}

Curve curve_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ArgumentError("curve JSON must be an object with a \"kind\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  auto build = [&]() -> Curve {
    if (kind == "self_similar") {
      SelfSimilarSpec spec;
      for (const auto& t : j.at("transforms")) {
        spec.transforms.push_back({t.at("s").get<double>(), t.at("theta").get<double>()});
      }
      if (j.contains("v0")) {
        const auto& v = j.at("v0");
        if (v.size() != 2) throw ArgumentError("self-similar v0 must be 2-D");
        spec.v0 = Eigen::Vector2d(v[0].get<double>(), v[1].get<double>());
      }
      spec.depth = j.value("depth", 12);
      const Interval d = domain_from(j, {0.0, 1.0});
      if (d.lo != 0.0 || d.hi != 1.0) throw ArgumentError("self-similar domain is [0, 1]");
      return Curve::self_similar(std::move(spec));
    }
    if (kind == "weierstrass_graph") {
      WeierstrassSpec spec;
      spec.lambda = j.value("lambda", spec.lambda);
      spec.s = j.value("s", spec.s);
      spec.terms = j.value("terms", spec.terms);
      return Curve::weierstrass(spec, domain_from(j, {0.0, 1.0}));
    }
    if (kind == "polyline") {
      PolylineSpec spec;
      for (const auto& v : j.at("vertices")) spec.vertices.push_back(point_from(v));
      return Curve::polyline(std::move(spec), domain_from(j, {0.0, 1.0}));
    }
    if (kind == "line_segment") {
      return Curve::line_segment({point_from(j.at("from")), point_from(j.at("to"))},
                                 domain_from(j, {0.0, 1.0}));
    }
    throw ArgumentError("unknown curve kind \"" + kind + "\"");
  };
  Curve curve = build();
  if (j.contains("affine")) {
    const auto& a = j.at("affine");
    if (a.contains("linear")) {
      const auto& rows = a.at("linear");
      const int dim = curve.embedding_dim();
      if (rows.size() != static_cast<std::size_t>(dim)) {
        throw ArgumentError("affine.linear dimension mismatch");
      }
      Eigen::MatrixXd m(dim, dim);
      for (int r = 0; r < dim; ++r) {
        if (rows[r].size() != static_cast<std::size_t>(dim)) {
          throw ArgumentError("affine.linear dimension mismatch");
        }
        for (int c = 0; c < dim; ++c) m(r, c) = rows[r][c].get<double>();
      }
      // a similarity: lambda * orthogonal
      const double lambda = std::sqrt((m.transpose() * m)(0, 0));
      if (!(lambda > 0.0)) throw ArgumentError("affine.linear must be a similarity");
      curve = curve.scaled(lambda).rotated(Eigen::MatrixXd(m / lambda));
    }
    if (a.contains("offset")) curve = curve.translated(point_from(a.at("offset")));
  }
  if (j.contains("reparam_power")) {
    curve = curve.reparametrized(j.at("reparam_power").get<double>());
  }
  return curve;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t curve_hash(const Curve& curve) { return fnv1a(curve_to_json(curve).dump()); }

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[value & 0xF];
    value >>= 4;
  }
  return s;
}

Json to_json(const OptimizerConfig& cfg) {
  Json j{{"alpha", cfg.alpha},
         {"delta", cfg.delta},
         {"seed", cfg.seed},
         {"max_normalized_iters", cfg.max_normalized_iters},
         {"restarts", cfg.restarts},
         {"insert_floor_fraction", cfg.insert_floor_fraction}};
  if (cfg.shift_probability) j["shift_probability"] = *cfg.shift_probability;
  if (cfg.remove_probability) j["remove_probability"] = *cfg.remove_probability;
  if (cfg.insert_probability) j["insert_probability"] = *cfg.insert_probability;
  return j;
}

Json to_json(const MassEstimate& est) {
  return Json{{"value", est.value},
              {"gamma_scaled_value", est.value * gamma_factor(est.alpha)},
              {"delta", est.delta},
              {"alpha", est.alpha},
              {"interval", {est.a, est.b}},
              {"seed", est.seed},
              {"best_restart", est.best_restart},
              {"restart_values", est.restart_values},
              {"iterations", est.iterations},
              {"subdivision_size", est.final_subdivision.empty()
                                       ? 0
                                       : est.final_subdivision.size() - 1},
              {"mesh", compute_mesh(est.final_subdivision)},
              {"degenerate", est.degenerate}};
}

Json to_json(const MassLimit& limit) {
  Json j{{"diverged", limit.diverged},
         {"deltas", limit.deltas},
         {"values", limit.values},
         {"spread", limit.spread},
         {"log_slope", limit.log_slope},
         {"non_increasing_toward_limit", limit.non_increasing_toward_limit}};
  j["value"] = limit.diverged ? Json("+infinity") : Json(limit.value);
  return j;
}

Json to_json(const InvarianceReport& report) {
  return Json{{"mass_before", report.mass_before},
              {"mass_after", report.mass_after},
              {"ratio", report.ratio},
              {"expected_ratio", report.expected_ratio},
              {"relative_error", report.relative_error}};
}

Json to_json(const DimensionEstimate& est) {
  Json brackets = Json::array();
  for (const auto& [lo, hi] : est.bracket_history) brackets.push_back({lo, hi});
  Json ratios = Json::array();
  for (const auto& r : est.ratios) ratios.push_back({{"alpha", r.alpha}, {"R", r.ratio}});
  return Json{{"alpha0", est.alpha0},
              {"bracket_history", brackets},
              {"ratios", ratios},
              {"delta_pair", {est.delta_fine, est.delta_coarse}},
              {"lower_end_hit", est.lower_end_hit}};
}

Json to_json(const IntegralResult& r) {
  return Json{{"value", r.value},
              {"lower_sum", r.lower_sum},
              {"upper_sum", r.upper_sum},
              {"gap", r.gap},
              {"subdivision_size", r.subdivision_size}};
}

Json to_json(const DerivativeResult& r) {
  return Json{{"value", r.value},
              {"richardson", r.richardson},
              {"error_estimate", r.error_estimate},
              {"u", r.u},
              {"step", r.step},
              {"one_sided", r.one_sided}};
}

Json to_json(const TaylorResult& r) {
  return Json{{"value", r.value},
              {"target", r.target},
              {"residual", r.residual},
              {"u_center", r.u_center},
              {"u_eval", r.u_eval},
              {"derivatives", r.derivatives}};
}

Json to_json(const OdeReport& r) {
  return Json{{"max_residual", r.max_residual},
              {"max_normalized_residual", r.max_normalized_residual},
              {"passed", r.passed}};
}

Json staircase_to_json(const StaircaseTable& table) {
  return Json{{"alpha", table.alpha()},
              {"origin", table.origin()},
              {"params", std::vector<double>(table.params().begin(), table.params().end())},
              {"values", std::vector<double>(table.values().begin(), table.values().end())},
              {"delta", table.delta},
              {"seed", table.seed},
              {"segment_masses", table.segment_masses}};
}

StaircaseTable staircase_from_json(const Json& j) {
  StaircaseTable t(j.at("alpha").get<double>(), j.at("params").get<std::vector<double>>(),
                   j.at("values").get<std::vector<double>>(), j.at("origin").get<double>());
  t.delta = j.value("delta", 0.0);
  t.seed = j.value("seed", std::uint64_t{0});
  t.segment_masses = j.value("segment_masses", std::vector<double>{});
  return t;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += header[i];
  }
  text_ += "\r\n";
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::vector<double>(values));
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ArgumentError("CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += "\r\n";
}

std::string staircase_csv(const StaircaseTable& table) {
  CsvWriter csv({"t", "S"});
  for (std::size_t k = 0; k < table.params().size(); ++k) {
    csv.row({table.params()[k], table.values()[k]});
  }
  return csv.str();
}

std::string trace_csv(const MassEstimate& est) {
  CsvWriter csv({"N_prime", "sigma"});
  for (const auto& tp : est.trace) csv.row({tp.normalized_iteration, tp.sigma});
  return csv.str();
}

std::string subdivision_csv(const Curve& curve, const MassEstimate& est) {
  std::vector<std::string> header{"t"};
  static const char* names[] = {"w_x", "w_y", "w_z"};
  for (int i = 0; i < curve.embedding_dim(); ++i) {
    header.push_back(i < 3 ? names[i] : "w_" + std::to_string(i));
  }
  CsvWriter csv(header);
  for (double t : est.final_subdivision) {
    const Point p = curve.evaluate(t);
    std::vector<double> row{t};
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(p[i]);
    csv.row(row);
  }
  return csv.str();
}

std::string ratios_csv(const DimensionEstimate& est) {
  CsvWriter csv({"alpha", "R"});
  for (const auto& r : est.ratios) csv.row({r.alpha, r.ratio});
  return csv.str();
}

std::string profile_csv(const std::vector<ProfilePoint>& profile) {
  CsvWriter csv({"t", "S_t", "distance_from_origin", "rho"});
  for (const auto& p : profile) csv.row({p.t, p.rise, p.distance, p.rho});
  return csv.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
}

}  // namespace fcalc
