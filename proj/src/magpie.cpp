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

#include "xtalmet/magpie.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "xtalmet/cache.hpp"
#include "xtalmet/elements.hpp"
#include "xtalmet/error.hpp"

namespace xtalmet {
namespace detail {
extern const std::string_view kBundledElementTable;
}  // namespace detail

namespace {

constexpr std::array<std::string_view, kMagpieProperties> kPropertyNames = {
    "Number",      "MendeleevNumber", "AtomicWeight", "MeltingT",   "Column",
    "Row",         "CovalentRadius",  "Electronegativity", "NsValence", "NpValence",
    "NdValence",   "NfValence",       "NValence",     "NsUnfilled", "NpUnfilled",
    "NdUnfilled",  "NfUnfilled",      "NUnfilled",    "GSvolume_pa", "GSbandgap",
    "GSmagmom",    "SpaceGroupNumber"};

constexpr std::array<std::string_view, 6> kStatNames = {"minimum", "maximum", "range",
                                                        "mean",    "avg_dev", "mode"};
constexpr std::array<int, 6> kNorms = {0, 2, 3, 5, 7, 10};

constexpr std::size_t kNsValence = 8;
constexpr std::size_t kNValence = 12;
constexpr std::size_t kElectronegativity = 7;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw InputError("element table line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

// numpy.isclose defaults, as used for Magpie's tie detection.
bool isclose(double a, double b) { return std::abs(a - b) <= 1e-8 + 1e-5 * std::abs(b); }

}  // namespace

const std::array<std::string_view, kMagpieProperties>& ElementTable::property_names() {
  return kPropertyNames;
}

const ElementTable& ElementTable::bundled() {
  static const ElementTable table = from_csv(detail::kBundledElementTable);
  return table;
}

ElementTable ElementTable::from_csv(std::string_view text) {
  ElementTable table;
  table.rows_.resize(kMaxAtomicNumber + 1);
  table.hash_ = sha256_hex(text);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (lineno == 1) {
      bool ok = cells.size() == kMagpieProperties + 3 && cells[0] == "symbol" && cells[1] == "Z" &&
                cells.back() == "OxidationStates";
      for (std::size_t p = 0; ok && p < kMagpieProperties; ++p) ok = cells[p + 2] == kPropertyNames[p];
      if (!ok) throw InputError("element table: unexpected header");
      continue;
    }
    if (cells.size() != kMagpieProperties + 3) {
      throw InputError("element table line " + std::to_string(lineno) + ": wrong column count");
    }
    const auto z = atomic_number(cells[0]);
    if (!z || std::to_string(*z) != cells[1]) {
      throw InputError("element table line " + std::to_string(lineno) + ": bad symbol/Z");
    }
    Row& row = table.rows_[*z];
    row.present = true;
    for (std::size_t p = 0; p < kMagpieProperties; ++p) {
      if (!cells[p + 2].empty()) row.values[p] = parse_double(cells[p + 2], lineno);
    }
    std::istringstream ox(cells.back());
    std::string tok;
    while (ox >> tok) row.oxidation_states.push_back(static_cast<int>(parse_double(tok, lineno)));
  }
  return table;
}

ElementTable ElementTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

std::optional<double> ElementTable::property(int z, std::size_t index) const {
  if (z < 1 || z > kMaxAtomicNumber || index >= kMagpieProperties) return std::nullopt;
  return rows_[z].values[index];
}

double ElementTable::require(int z, std::size_t index) const {
  auto v = property(z, index);
  if (!v) {
    throw InputError("element table has no " + std::string(kPropertyNames.at(index)) + " for " +
                     std::string(element_symbol(z)));
  }
  return *v;
}

const std::vector<int>& ElementTable::oxidation_states(int z) const {
  static const std::vector<int> none;
  if (z < 1 || z > kMaxAtomicNumber) return none;
  return rows_[z].oxidation_states;
}

const std::array<std::string, kMagpieLength>& magpie_labels() {
  static const auto labels = [] {
    std::array<std::string, kMagpieLength> out;
    std::size_t i = 0;
    for (int p : kNorms) out[i++] = std::to_string(p) + "-norm";
    for (auto prop : kPropertyNames) {
      for (auto stat : kStatNames) {
        out[i++] = "MagpieData " + std::string(stat) + " " + std::string(prop);
      }
    }
    for (const char* shell : {"s", "p", "d", "f"}) {
      out[i++] = std::string("frac ") + shell + " valence electrons";
    }
    out[i++] = "compound possible";
    out[i++] = "max ionic char";
    out[i++] = "avg ionic char";
    return out;
  }();
  return labels;
}

MagpieVector magpie_fingerprint(const Composition& composition, const ElementTable& table) {
  if (composition.empty()) throw InputError("empty composition");
  const auto fractions = composition.fractions();
  const std::size_t n = fractions.size();
  std::vector<double> x(n);
  std::vector<int> z(n);
  for (std::size_t i = 0; i < n; ++i) std::tie(z[i], x[i]) = fractions[i];

  MagpieVector out;
  std::size_t at = 0;

  for (int p : kNorms) {
    if (p == 0) {
      out.values[at++] = static_cast<double>(n);
      continue;
    }
    double s = 0;
    for (double xi : x) s += std::pow(xi, p);
    out.values[at++] = std::pow(s, 1.0 / p);
  }

  const double x_max = *std::max_element(x.begin(), x.end());
  std::vector<double> v(n);
  for (std::size_t p = 0; p < kMagpieProperties; ++p) {
    for (std::size_t i = 0; i < n; ++i) v[i] = table.require(z[i], p);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i] * v[i];
    double dev = 0;
    for (std::size_t i = 0; i < n; ++i) dev += x[i] * std::abs(v[i] - mean);
    // Most abundant element's value; ties resolved to the smallest value.
    double mode = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (isclose(x[i], x_max)) mode = std::min(mode, v[i]);
    }
    out.values[at++] = *lo;
    out.values[at++] = *hi;
    out.values[at++] = *hi - *lo;
    out.values[at++] = mean;
    out.values[at++] = dev;
    out.values[at++] = mode;
  }

  double total_valence = 0;
  for (std::size_t i = 0; i < n; ++i) total_valence += x[i] * table.require(z[i], kNValence);
  if (!(total_valence > 0)) throw InputError("composition has no valence electrons");
  for (std::size_t shell = 0; shell < 4; ++shell) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * table.require(z[i], kNsValence + shell);
    out.values[at++] = s / total_valence;
  }

  if (n < 2) {
    out.values[at++] = 1.0;
    out.values[at++] = 0.0;
    out.values[at++] = 0.0;
  } else {
    // Charge-neutral combination with one oxidation state per element.
    bool possible = false;
    std::vector<std::size_t> pick(n, 0);
    bool any_empty = false;
    for (std::size_t i = 0; i < n; ++i) any_empty |= table.oxidation_states(z[i]).empty();
    while (!any_empty && !possible) {
      double charge = 0;
      for (std::size_t i = 0; i < n; ++i) charge += x[i] * table.oxidation_states(z[i])[pick[i]];
      if (std::abs(charge) <= 1e-8) possible = true;
      std::size_t i = 0;
      while (i < n && ++pick[i] == table.oxidation_states(z[i]).size()) pick[i++] = 0;
      if (i == n) break;
    }
    std::vector<double> chi(n);
    for (std::size_t i = 0; i < n; ++i) chi[i] = table.require(z[i], kElectronegativity);
    double max_ionic = 0, avg_ionic = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = chi[i] - chi[j];
        const double ionic = 1.0 - std::exp(-0.25 * d * d);
        max_ionic = std::max(max_ionic, ionic);
        avg_ionic += x[i] * x[j] * ionic;
      }
    }
    out.values[at++] = possible ? 1.0 : 0.0;
    out.values[at++] = max_ionic;
    out.values[at++] = avg_ionic;
  }
  return out;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("fingerprint lengths differ");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double d_magpie(const MagpieVector& a, const MagpieVector& b) {
  return l2_distance(a.span(), b.span());
}

double d_magpie(const Crystal& a, const Crystal& b, const ElementTable& table) {
  return d_magpie(magpie_fingerprint(composition_of(a), table),
                  magpie_fingerprint(composition_of(b), table));
}

}  // namespace xtalmet
