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

#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "xtalmet/metrics.hpp"

namespace xtalmet {

nlohmann::json to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& j);

// Presentation factor for tables: 1/1000 for magpie, 1 otherwise. Stored
// values are always raw.
double presentation_scale(DistanceKind kind);

// Comparison table, rows "<U|N>,<kind>[,screened]" and one column per model.
std::string comparison_csv(std::span<const MetricReport> reports);

}  // namespace xtalmet
