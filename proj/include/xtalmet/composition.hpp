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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xtalmet/structures.hpp"

namespace xtalmet {

/// Element -> amount map. Amounts must be positive; comparisons use the
/// reduced form, so Zn2O2 == ZnO.
class Composition {
 public:
  Composition() = default;
  explicit Composition(std::map<int, double> amounts);

  const std::map<int, double>& amounts() const { return amounts_; }
  bool empty() const { return amounts_.empty(); }

  /// (Z, atomic fraction) ordered by Z.
  std::vector<std::pair<int, double>> fractions() const;

  /// Canonical reduced formula, elements by ascending Z and the GCD of the
  /// counts divided out, e.g. ZnO -> "OZn", Bi2Te3 -> "Te3Bi2".
  /// Non-integral amounts are expressed relative to the smallest one.
  const std::string& reduced_formula() const { return reduced_; }

  friend bool operator==(const Composition& a, const Composition& b) {
    return a.reduced_ == b.reduced_;
  }

 private:
  std::map<int, double> amounts_;
  std::string reduced_;
};

Composition composition_of(const Crystal& crystal);

// 0 iff the reduced compositions are equal.
int d_comp(const Crystal& a, const Crystal& b);

}  // namespace xtalmet
