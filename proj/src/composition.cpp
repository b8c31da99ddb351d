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

#include "xtalmet/composition.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "xtalmet/elements.hpp"
#include "xtalmet/error.hpp"

namespace xtalmet {
namespace {

std::string format_count(double x) {
  if (std::abs(x - 1.0) < 1e-9) return {};
  if (std::abs(x - std::round(x)) < 1e-9) return fmt::format("{}", std::llround(x));
  return fmt::format("{:.6g}", x);
}

}  // namespace

Composition::Composition(std::map<int, double> amounts) : amounts_(std::move(amounts)) {
  for (const auto& [z, amount] : amounts_) {
    element_symbol(z);
    if (!(amount > 0) || !std::isfinite(amount)) {
      throw InputError("composition amounts must be positive");
    }
  }
  bool integral = true;
  long long g = 0;
  double smallest = 0;
  for (const auto& [z, amount] : amounts_) {
    if (std::abs(amount - std::round(amount)) > 1e-9) integral = false;
    g = std::gcd(g, std::llround(amount));
    smallest = smallest == 0 ? amount : std::min(smallest, amount);
  }
  const double divisor = integral ? static_cast<double>(g) : smallest;
  for (const auto& [z, amount] : amounts_) {
    reduced_ += std::string(element_symbol(z)) + format_count(amount / divisor);
  }
}

std::vector<std::pair<int, double>> Composition::fractions() const {
  double total = 0;
  for (const auto& [z, amount] : amounts_) total += amount;
  std::vector<std::pair<int, double>> out;
  out.reserve(amounts_.size());
  for (const auto& [z, amount] : amounts_) out.emplace_back(z, amount / total);
  return out;
}

Composition composition_of(const Crystal& crystal) {
  std::map<int, double> counts;
  for (const Site& s : crystal.sites()) counts[s.element().z()] += 1.0;
  return Composition(std::move(counts));
}

int d_comp(const Crystal& a, const Crystal& b) {
  return composition_of(a) == composition_of(b) ? 0 : 1;
}

}  // namespace xtalmet
