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
#include <string_view>
#include <vector>

#include "xtalmet/linalg.hpp"

namespace xtalmet {

/// Periodic lattice. Rows of `basis()` are the lattice vectors a, b, c in
/// Angstrom; the basis is always right-handed with |det| >= 1e-8 A^3.
class Lattice {
 public:
  explicit Lattice(const Mat3& basis);

  /// Standard crystallographic setting: a along x, b in the xy-plane.
  /// Angles in degrees.
  static Lattice from_parameters(double a, double b, double c, double alpha,
                                 double beta, double gamma);

  const Mat3& basis() const { return basis_; }
  double volume() const { return volume_; }
  Vec3 lengths() const;
  /// (alpha, beta, gamma) in degrees: angles b^c, a^c, a^b.
  Vec3 angles() const;
  Mat3 metric() const { return basis_ * basis_.transpose(); }

  Vec3 to_cartesian(const Vec3& frac) const { return basis_.transpose() * frac; }
  Vec3 to_fractional(const Vec3& cart) const { return inv_transpose_ * cart; }

  /// Shortest Cartesian vector among the periodic images of `frac_delta`.
  /// Exact for Niggli-reduced bases; a close upper bound otherwise.
  Vec3 min_image(const Vec3& frac_delta) const;
  double min_image_distance(const Vec3& frac_a, const Vec3& frac_b) const {
    return min_image(frac_b - frac_a).norm();
  }

 private:
  Mat3 basis_;
  Mat3 inv_transpose_;
  double volume_ = 0.0;
};

/// Chemical element, identified by atomic number 1..103.
class Element {
 public:
  explicit Element(int z);
  /// Throws InputError("unknown element ...") for unrecognised symbols.
  static Element from_symbol(std::string_view symbol);

  int z() const { return z_; }
  std::string_view symbol() const;

  friend bool operator==(Element, Element) = default;
  friend auto operator<=>(Element, Element) = default;

 private:
  int z_;
};

/// Atomic site; fractional coordinates are wrapped into [0, 1) on
/// construction.
class Site {
 public:
  Site(Element element, const Vec3& frac);

  Element element() const { return element_; }
  const Vec3& frac() const { return frac_; }

 private:
  Element element_;
  Vec3 frac_;
};

/// Space-group number plus the multiset of occupied Wyckoff letters, as
/// supplied with the input. Not derived from geometry.
struct SymmetryRecord {
  int spacegroup = 1;
  std::vector<std::string> wyckoff;

  /// Throws InputError unless 1 <= spacegroup <= 230 and `wyckoff` is
  /// non-empty.
  void validate() const;
};

class Crystal {
 public:
  /// Validates the site list: non-empty, and no two same-element sites
  /// closer than 1e-4 A after periodic wrapping.
  Crystal(std::string id, Lattice lattice, std::vector<Site> sites,
          std::optional<SymmetryRecord> symmetry = std::nullopt,
          std::optional<double> e_hull = std::nullopt);

  const std::string& id() const { return id_; }
  const Lattice& lattice() const { return lattice_; }
  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  const std::optional<SymmetryRecord>& symmetry() const { return symmetry_; }
  const std::optional<double>& e_hull() const { return e_hull_; }

  Vec3 cartesian(std::size_t i) const {
    return lattice_.to_cartesian(sites_[i].frac());
  }

  Crystal with_id(std::string id) const;
  Crystal with_e_hull(std::optional<double> e_hull) const;
  Crystal with_symmetry(std::optional<SymmetryRecord> symmetry) const;

 private:
  std::string id_;
  Lattice lattice_;
  std::vector<Site> sites_;
  std::optional<SymmetryRecord> symmetry_;
  std::optional<double> e_hull_;
};

/// Ordered multiset of crystals from one model; order is generation order.
struct SampleSet {
  std::string label;
  std::vector<Crystal> crystals;

  std::size_t size() const { return crystals.size(); }
  bool empty() const { return crystals.empty(); }
};

}  // namespace xtalmet
