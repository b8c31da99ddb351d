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

#include "xtalmet/structures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "xtalmet/elements.hpp"
#include "xtalmet/error.hpp"

namespace xtalmet {
namespace {

constexpr double kMinVolume = 1e-8;
constexpr double kDuplicateSiteTol = 1e-4;

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double angle_between(const Vec3& u, const Vec3& v) {
  double c = u.dot(v) / (u.norm() * v.norm());
  return deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

}  // namespace

Lattice::Lattice(const Mat3& basis) : basis_(basis) {
  if (!basis_.allFinite()) throw InputError("degenerate lattice: non-finite basis");
  const double det = basis_.determinant();
  if (std::abs(det) < kMinVolume) throw InputError("degenerate lattice: |det| < 1e-8");
  if (det < 0) throw InputError("degenerate lattice: left-handed basis");
  volume_ = det;
  inv_transpose_ = basis_.transpose().inverse();
}

Lattice Lattice::from_parameters(double a, double b, double c, double alpha,
                                 double beta, double gamma) {
  const double rad = std::numbers::pi / 180.0;
  const double ca = std::cos(alpha * rad), cb = std::cos(beta * rad);
  const double cg = std::cos(gamma * rad), sg = std::sin(gamma * rad);
  if (!(a > 0 && b > 0 && c > 0) || std::abs(sg) < 1e-12) {
    throw InputError("degenerate lattice parameters");
  }
  const double cx = cb;
  const double cy = (ca - cb * cg) / sg;
  const double cz2 = 1.0 - cx * cx - cy * cy;
  if (!(cz2 > 0)) throw InputError("degenerate lattice parameters");
  Mat3 m;
  m << a, 0, 0,          //
      b * cg, b * sg, 0,  //
      c * cx, c * cy, c * std::sqrt(cz2);
  return Lattice(m);
}

Vec3 Lattice::lengths() const {
  return {basis_.row(0).norm(), basis_.row(1).norm(), basis_.row(2).norm()};
}

Vec3 Lattice::angles() const {
  const Vec3 a = basis_.row(0), b = basis_.row(1), c = basis_.row(2);
  return {angle_between(b, c), angle_between(a, c), angle_between(a, b)};
}

Vec3 Lattice::min_image(const Vec3& frac_delta) const {
  const Vec3 centered = wrap_centered(frac_delta);
  Vec3 best = to_cartesian(centered);
  double best_norm = best.squaredNorm();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Vec3 v = to_cartesian(centered + Vec3(i, j, k));
        const double n = v.squaredNorm();
        if (n < best_norm) {
          best_norm = n;
          best = v;
        }
      }
    }
  }
  return best;
}

Element::Element(int z) : z_(z) {
  if (z < 1 || z > kMaxAtomicNumber) {
    throw InputError("unknown element with Z=" + std::to_string(z));
  }
}

Element Element::from_symbol(std::string_view symbol) {
  auto z = atomic_number(symbol);
  if (!z) throw InputError("unknown element '" + std::string(symbol) + "'");
  return Element(*z);
}

std::string_view Element::symbol() const { return element_symbol(z_); }

Site::Site(Element element, const Vec3& frac) : element_(element) {
  if (!frac.allFinite()) throw InputError("non-finite fractional coordinate");
  frac_ = wrap_unit(frac);
}

void SymmetryRecord::validate() const {
  if (spacegroup < 1 || spacegroup > 230) {
    throw InputError("space group out of range: " + std::to_string(spacegroup));
  }
  if (wyckoff.empty()) throw InputError("empty Wyckoff letter multiset");
}

Crystal::Crystal(std::string id, Lattice lattice, std::vector<Site> sites,
                 std::optional<SymmetryRecord> symmetry, std::optional<double> e_hull)
    : id_(std::move(id)),
      lattice_(std::move(lattice)),
      sites_(std::move(sites)),
      symmetry_(std::move(symmetry)),
      e_hull_(e_hull) {
  if (sites_.empty()) throw InputError("crystal has no sites");
  if (symmetry_) symmetry_->validate();
  if (e_hull_ && !std::isfinite(*e_hull_)) throw InputError("non-finite e_hull");
  // Coincident images sit within the centred fractional difference, so the
  // direct image is enough at this tolerance.
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (std::size_t j = i + 1; j < sites_.size(); ++j) {
      if (sites_[i].element() != sites_[j].element()) continue;
      const Vec3 d = lattice_.to_cartesian(wrap_centered(sites_[j].frac() - sites_[i].frac()));
      if (d.norm() < kDuplicateSiteTol) {
        throw InputError("duplicate " + std::string(sites_[i].element().symbol()) +
                         " sites " + std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

Crystal Crystal::with_id(std::string id) const {
  Crystal c = *this;
  c.id_ = std::move(id);
  return c;
}

Crystal Crystal::with_e_hull(std::optional<double> e_hull) const {
  Crystal c = *this;
  c.e_hull_ = e_hull;
  return c;
}

Crystal Crystal::with_symmetry(std::optional<SymmetryRecord> symmetry) const {
  if (symmetry) symmetry->validate();
  Crystal c = *this;
  c.symmetry_ = std::move(symmetry);
  return c;
}

}  // namespace xtalmet
