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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "xtalmet/structures.hpp"

namespace xtalmet {

/// ltol: relative lattice-length tolerance. stol: site tolerance as a
/// fraction of (V/m)^(1/3). angle_tol: degrees.
struct MatchTolerances {
  double ltol = 0.2;
  double stol = 0.3;
  double angle_tol = 5.0;

  void validate() const;  // all strictly positive, else InputError
};

inline constexpr std::size_t kMaxMatcherSites = 200;
inline constexpr std::size_t kMaxLatticeMappings = 1000;

/// Primitive, Niggli-reduced cell plus reduced formula: everything the
/// matcher needs from one crystal. Reusable across many comparisons.
struct PreparedStructure {
  std::string formula;
  Lattice lattice;
  std::vector<int> species;  // atomic numbers
  std::vector<Vec3> frac;
};

/// Throws InputError("matcher input too large") past kMaxMatcherSites
/// primitive sites.
PreparedStructure prepare_for_matching(const Crystal& crystal);

/// Smallest normalised max displacement over all lattice mappings and anchor
/// translations, or nullopt when compositions, primitive site counts or
/// lattices are incompatible. With `stop_below` set, the search returns as
/// soon as an alignment reaches it.
std::optional<double> match_displacement(const PreparedStructure& a,
                                         const PreparedStructure& b,
                                         const MatchTolerances& tol,
                                         std::optional<double> stop_below = std::nullopt);

/// Structure-matcher distance: 1 for different reduced compositions,
/// otherwise 0 iff some alignment of the primitive cells puts every atom
/// within stol * (V/m)^(1/3) of a same-element partner.
int d_smat(const PreparedStructure& a, const PreparedStructure& b,
           const MatchTolerances& tol = {});
int d_smat(const Crystal& a, const Crystal& b, const MatchTolerances& tol = {});

/// x, x' = x with one site moved by +delta * direction, x'' = moved by
/// -delta * direction, with d(x,x') = d(x,x'') = 0 and d(x',x'') = 1.
struct SmatChain {
  Crystal base;
  Crystal plus;
  Crystal minus;
  double delta = 0.0;
};

/// Bisects delta for each site and axis until the pattern above appears.
/// Throws InputError for bases with fewer than two sites, or if no site and
/// direction straddles the threshold.
SmatChain build_smat_chain(const Crystal& base, const MatchTolerances& tol = {});

}  // namespace xtalmet
