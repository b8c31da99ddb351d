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

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xtalmet/composition.hpp"

namespace xtalmet {

inline constexpr std::size_t kMagpieProperties = 22;
inline constexpr std::size_t kMagpieLength = 145;

/// Elemental property table behind the Magpie fingerprint. The default is the
/// bundled element_properties_v1.csv; any CSV with the same header works.
///
/// Columns: symbol, Z, the 22 properties in `property_names()` order, then
/// OxidationStates (space separated). Empty cells mean "no data".
class ElementTable {
 public:
  static const ElementTable& bundled();
  static ElementTable from_csv(std::string_view text);
  static ElementTable load(const std::filesystem::path& path);

  static const std::array<std::string_view, kMagpieProperties>& property_names();

  std::optional<double> property(int z, std::size_t index) const;
  /// Throws InputError naming the element and property when absent.
  double require(int z, std::size_t index) const;
  const std::vector<int>& oxidation_states(int z) const;

  /// SHA-256 of the CSV text; recorded in embedding caches.
  const std::string& content_hash() const { return hash_; }

 private:
  struct Row {
    std::array<std::optional<double>, kMagpieProperties> values;
    std::vector<int> oxidation_states;
    bool present = false;
  };
  std::vector<Row> rows_;  // indexed by Z
  std::string hash_;
};

/// 145 Magpie attributes, in order:
///   [0, 6)     p-norms of the fraction vector, p = 0, 2, 3, 5, 7, 10
///   [6, 138)   per property: min, max, range, mean, avg_dev, mode
///   [138, 142) fraction of valence electrons in s, p, d, f shells
///   [142, 145) compound possible, max ionic char, avg ionic char
struct MagpieVector {
  std::array<double, kMagpieLength> values{};

  std::span<const double> span() const { return values; }
};

const std::array<std::string, kMagpieLength>& magpie_labels();

MagpieVector magpie_fingerprint(const Composition& composition,
                                const ElementTable& table = ElementTable::bundled());

double l2_distance(std::span<const double> a, std::span<const double> b);

double d_magpie(const MagpieVector& a, const MagpieVector& b);
double d_magpie(const Crystal& a, const Crystal& b,
                const ElementTable& table = ElementTable::bundled());

}  // namespace xtalmet
