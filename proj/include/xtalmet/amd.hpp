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
#include <vector>

#include "xtalmet/structures.hpp"

namespace xtalmet {

inline constexpr int kDefaultAmdK = 100;

/// Average Minimum Distance vector: entry j is the mean over the cell's sites
/// of the distance to the (j+1)-th nearest neighbour in the infinite crystal.
class AmdVector {
 public:
  /// Requires values non-empty, non-decreasing and values[0] > 0.
  explicit AmdVector(std::vector<double> values);

  int k() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](int j) const { return values_[j]; }

 private:
  std::vector<double> values_;
};

/// For each site, the k smallest distances (ascending) to all other points of
/// the periodic structure, excluding the site itself. Throws
/// std::runtime_error if the search radius would exceed 1e3 A.
std::vector<std::vector<double>> neighbor_distances(const Crystal& crystal, int k);

AmdVector amd_vector(const Crystal& crystal, int k = kDefaultAmdK);

double linf_distance(std::span<const double> a, std::span<const double> b);

/// L-infinity distance; throws InputError if the k values differ.
double d_amd(const AmdVector& a, const AmdVector& b);
double d_amd(const Crystal& a, const Crystal& b, int k = kDefaultAmdK);

}  // namespace xtalmet
