// Copyright 2026 The xtalmet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xtalmet/report.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "xtalmet/error.hpp"

namespace xtalmet {

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["distance"] = std::string(to_string(r.kind));
  if (r.kind == DistanceKind::amd) j["k"] = r.k;
  if (r.kind == DistanceKind::smat) {
    j["ltol"] = r.tolerances.ltol;
    j["stol"] = r.tolerances.stol;
    j["angle_tol"] = r.tolerances.angle_tol;
  }
  if (r.kind == DistanceKind::magpie) j["property_table"] = r.table_hash;
  j["screened"] = r.screened;
  if (r.screened) {
    j["e_hull_max"] = r.e_hull_max;
    j["denominator"] = std::string(to_string(r.denominator));
  }
  if (r.uniqueness) j["uniqueness"] = *r.uniqueness;
  if (r.novelty) j["novelty"] = *r.novelty;
  j["n_total"] = r.counts.n_total;
  j["n_kept"] = r.counts.n_kept;
  if (r.novelty) j["m_train"] = r.counts.m_train;
  j["missing_e_hull"] = r.counts.missing_e_hull;
  return j;
}

MetricReport report_from_json(const nlohmann::json& j) {
  try {
    MetricReport r;
    r.model = j.at("model").get<std::string>();
    r.kind = parse_distance_kind(j.at("distance").get<std::string>());
    r.k = j.value("k", kDefaultAmdK);
    r.tolerances.ltol = j.value("ltol", r.tolerances.ltol);
    r.tolerances.stol = j.value("stol", r.tolerances.stol);
    r.tolerances.angle_tol = j.value("angle_tol", r.tolerances.angle_tol);
    r.table_hash = j.value("property_table", std::string{});
    r.screened = j.value("screened", false);
    r.e_hull_max = j.value("e_hull_max", r.e_hull_max);
    if (j.contains("denominator")) {
      r.denominator = parse_denominator(j.at("denominator").get<std::string>());
    }
    if (j.contains("uniqueness")) r.uniqueness = j.at("uniqueness").get<double>();
    if (j.contains("novelty")) r.novelty = j.at("novelty").get<double>();
    r.counts.n_total = j.value("n_total", std::size_t{0});
    r.counts.n_kept = j.value("n_kept", std::size_t{0});
    r.counts.m_train = j.value("m_train", std::size_t{0});
    r.counts.missing_e_hull = j.value("missing_e_hull", std::size_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed metric report: ") + e.what());
  }
}

double presentation_scale(DistanceKind kind) {
  return kind == DistanceKind::magpie ? 1e-3 : 1.0;
}

std::string comparison_csv(std::span<const MetricReport> reports) {
  std::vector<std::string> models;
  // row label -> model -> value
  std::vector<std::string> rows;
  std::map<std::string, std::map<std::string, double>> cells;
  auto add = [&](const std::string& row, const std::string& model, double v) {
    if (!cells.contains(row)) rows.push_back(row);
    cells[row][model] = v;
  };
  for (const auto& r : reports) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) {
      models.push_back(r.model);
    }
    const std::string suffix =
        std::string(",") + std::string(to_string(r.kind)) + (r.screened ? ",screened" : "");
    const double s = presentation_scale(r.kind);
    if (r.uniqueness) add("U" + suffix, r.model, *r.uniqueness * s);
    if (r.novelty) add("N" + suffix, r.model, *r.novelty * s);
  }
  std::string out = "metric,distance,screened";
  for (const auto& m : models) out += "," + m;
  out += '\n';
  for (const auto& row : rows) {
    std::string line = row;
    if (row.find(",screened") == std::string::npos) line += ",";
    const auto& byModel = cells[row];
    for (const auto& m : models) {
      line += ',';
      if (auto it = byModel.find(m); it != byModel.end()) line += fmt::format("{:.6g}", it->second);
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace xtalmet
