#pragma once

#include "fractal_calc/absorption.hpp"
#include "fractal_calc/calculus.hpp"
#include "fractal_calc/curve.hpp"
#include "fractal_calc/dimension.hpp"
#include "fractal_calc/mass.hpp"
#include "fractal_calc/staircase.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fcalc {

using Json = nlohmann::json;

// {"kind", "domain", "transforms", "v0", "depth", ...}; similarity post-maps
// and re-parametrizations round-trip under "affine" and "reparam_power".
Json curve_to_json(const Curve& curve);
Curve curve_from_json(const Json& j);

std::uint64_t fnv1a(std::string_view bytes);
// FNV-1a over the canonical JSON text of the curve.
std::uint64_t curve_hash(const Curve& curve);
std::string hex64(std::uint64_t value);

Json to_json(const OptimizerConfig& cfg);
Json to_json(const MassEstimate& est);
Json to_json(const MassLimit& limit);
Json to_json(const InvarianceReport& report);
Json to_json(const DimensionEstimate& est);
Json to_json(const IntegralResult& r);
Json to_json(const DerivativeResult& r);
Json to_json(const TaylorResult& r);
Json to_json(const OdeReport& r);

Json staircase_to_json(const StaircaseTable& table);
StaircaseTable staircase_from_json(const Json& j);

// Shortest round-trip decimal form.
std::string format_double(double v);

// RFC 4180: header row, CRLF line breaks, unquoted numeric fields.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string staircase_csv(const StaircaseTable& table);
std::string trace_csv(const MassEstimate& est);
std::string subdivision_csv(const Curve& curve, const MassEstimate& est);
std::string ratios_csv(const DimensionEstimate& est);
std::string profile_csv(const std::vector<ProfilePoint>& profile);

// Writes through a temporary sibling file and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace fcalc
