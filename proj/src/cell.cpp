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

#include "xtalmet/cell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "xtalmet/error.hpp"

namespace xtalmet {

Crystal make_supercell(const Crystal& crystal, int n1, int n2, int n3, std::size_t site_cap) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw InputError("supercell multipliers must be positive");
  const std::size_t count = crystal.size() * static_cast<std::size_t>(n1) *
                            static_cast<std::size_t>(n2) * static_cast<std::size_t>(n3);
  if (count > site_cap) {
    throw InputError("supercell would have " + std::to_string(count) + " sites (cap " +
                     std::to_string(site_cap) + ")");
  }
  Mat3 basis = crystal.lattice().basis();
  basis.row(0) *= n1;
  basis.row(1) *= n2;
  basis.row(2) *= n3;
  const Vec3 scale(n1, n2, n3);
  std::vector<Site> sites;
  sites.reserve(count);
  for (const Site& s : crystal.sites()) {
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        for (int k = 0; k < n3; ++k) {
          sites.emplace_back(s.element(), (s.frac() + Vec3(i, j, k)).cwiseQuotient(scale));
        }
      }
    }
  }
  return Crystal(crystal.id(), Lattice(basis), std::move(sites), crystal.symmetry(),
                 crystal.e_hull());
}

// Krivy & Gruber (1976) with the epsilon handling of Grosse-Kunstleve et al.
// (2004). Works on the basis directly: each step is b' = M^T b.
Lattice niggli_reduce(const Lattice& lattice, double tol) {
  Mat3 b = lattice.basis();
  const double eps = tol * std::cbrt(lattice.volume());
  auto apply = [&b](const Mat3& m) { b = m.transpose() * b; };
  auto sign = [eps](double x) { return std::abs(x) < eps ? 0 : (x > 0 ? 1 : -1); };

  constexpr int kMaxSteps = 1000;
  int step = 0;
  for (; step < kMaxSteps; ++step) {
    Mat3 g = b * b.transpose();
    double A = g(0, 0), B = g(1, 1), C = g(2, 2);
    double xi = 2 * g(1, 2), eta = 2 * g(0, 2), zeta = 2 * g(0, 1);

    // A1
    if (B + eps < A || (std::abs(A - B) < eps && std::abs(xi) > std::abs(eta) + eps)) {
      Mat3 m;
      m << 0, -1, 0, -1, 0, 0, 0, 0, -1;
      apply(m);
      g = b * b.transpose();
      A = g(0, 0), B = g(1, 1), C = g(2, 2);
      xi = 2 * g(1, 2), eta = 2 * g(0, 2), zeta = 2 * g(0, 1);
    }
    // A2
    if (C + eps < B || (std::abs(B - C) < eps && std::abs(eta) > std::abs(zeta) + eps)) {
      Mat3 m;
      m << -1, 0, 0, 0, 0, -1, 0, -1, 0;
      apply(m);
      continue;
    }
    const int l = sign(xi), mm = sign(eta), n = sign(zeta);
    if (l * mm * n == 1) {
      // A3
      Mat3 m = Mat3::Zero();
      m(0, 0) = l == -1 ? -1 : 1;
      m(1, 1) = mm == -1 ? -1 : 1;
      m(2, 2) = n == -1 ? -1 : 1;
      apply(m);
    } else if (l * mm * n == 0 || l * mm * n == -1) {
      // A4
      int i = l == 1 ? -1 : 1;
      int j = mm == 1 ? -1 : 1;
      int k = n == 1 ? -1 : 1;
      if (i * j * k == -1) {
        if (n == 0) {
          k = -1;
        } else if (mm == 0) {
          j = -1;
        } else if (l == 0) {
          i = -1;
        }
      }
      Mat3 m = Mat3::Zero();
      m(0, 0) = i;
      m(1, 1) = j;
      m(2, 2) = k;
      apply(m);
    }
    g = b * b.transpose();
    A = g(0, 0), B = g(1, 1), C = g(2, 2);
    xi = 2 * g(1, 2), eta = 2 * g(0, 2), zeta = 2 * g(0, 1);

    // A5
    if (std::abs(xi) > B + eps || (std::abs(xi - B) < eps && 2 * eta < zeta - eps) ||
        (std::abs(xi + B) < eps && zeta < -eps)) {
      Mat3 m = Mat3::Identity();
      m(1, 2) = xi > 0 ? -1 : 1;
      apply(m);
      continue;
    }
    // A6
    if (std::abs(eta) > A + eps || (std::abs(A - eta) < eps && 2 * xi < zeta - eps) ||
        (std::abs(A + eta) < eps && zeta < -eps)) {
      Mat3 m = Mat3::Identity();
      m(0, 2) = eta > 0 ? -1 : 1;
      apply(m);
      continue;
    }
    // A7
    if (std::abs(zeta) > A + eps || (std::abs(A - zeta) < eps && 2 * xi < eta - eps) ||
        (std::abs(A + zeta) < eps && eta < -eps)) {
      Mat3 m = Mat3::Identity();
      m(0, 1) = zeta > 0 ? -1 : 1;
      apply(m);
      continue;
    }
    // A8
    const double s = xi + eta + zeta + A + B;
    if (s < -eps || (std::abs(s) < eps && 2 * (A + eta) + zeta > eps)) {
      Mat3 m = Mat3::Identity();
      m(0, 2) = 1;
      m(1, 2) = 1;
      apply(m);
      continue;
    }
    break;
  }
  if (step == kMaxSteps) throw std::runtime_error("Niggli reduction did not converge");
  if (b.determinant() < 0) b = -b;
  return Lattice(b);
}

namespace {

Crystal reexpress(const Crystal& crystal, const Lattice& lattice) {
  std::vector<Site> sites;
  sites.reserve(crystal.size());
  for (std::size_t i = 0; i < crystal.size(); ++i) {
    sites.emplace_back(crystal.sites()[i].element(), lattice.to_fractional(crystal.cartesian(i)));
  }
  return Crystal(crystal.id(), lattice, std::move(sites), crystal.symmetry(), crystal.e_hull());
}

}  // namespace

Crystal niggli_reduce(const Crystal& crystal, double tol) {
  return reexpress(crystal, niggli_reduce(crystal.lattice(), tol));
}

Crystal primitive_reduce(const Crystal& crystal, double site_tol) {
  if (!(site_tol > 0)) throw InputError("site tolerance must be positive");
  const Lattice& lat = crystal.lattice();
  const auto& sites = crystal.sites();
  const std::size_t m = sites.size();

  // Anchor on the rarest element (lowest Z on ties).
  std::map<int, std::size_t> counts;
  for (const Site& s : sites) ++counts[s.element().z()];
  int anchor_z = counts.begin()->first;
  for (const auto& [z, n] : counts) {
    if (n < counts[anchor_z]) anchor_z = z;
  }
  std::size_t anchor = 0;
  while (sites[anchor].element().z() != anchor_z) ++anchor;

  auto maps_onto_itself = [&](const Vec3& t) {
    for (const Site& s : sites) {
      const Vec3 moved = s.frac() + t;
      bool found = false;
      for (const Site& o : sites) {
        if (o.element() == s.element() && lat.min_image_distance(moved, o.frac()) <= site_tol) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };

  std::vector<Vec3> translations;  // non-zero, wrapped into [0,1)
  for (std::size_t j = 0; j < m; ++j) {
    if (j == anchor || sites[j].element().z() != anchor_z) continue;
    const Vec3 t = wrap_unit(sites[j].frac() - sites[anchor].frac());
    if (lat.min_image(t).norm() <= site_tol) continue;
    if (maps_onto_itself(t)) translations.push_back(t);
  }
  const std::size_t group = translations.size() + 1;
  if (group == 1 || m % group != 0) return niggli_reduce(crystal);

  // Every element of the finer lattice is t + n with t a coset
  // representative; its Hermite-normal-form basis uses n in {0,1}^3, so the
  // candidates below always contain a basis. Take the shortest triple whose
  // volume is V / group.
  std::vector<Vec3> cands;
  translations.push_back(Vec3::Zero());
  for (const Vec3& t : translations) {
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        for (int k = -1; k <= 1; ++k) {
          const Vec3 v = lat.to_cartesian(t + Vec3(i, j, k));
          if (v.norm() > site_tol) cands.push_back(v);
        }
      }
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Vec3& a, const Vec3& b) { return a.squaredNorm() < b.squaredNorm(); });
  const double target = lat.volume() / static_cast<double>(group);
  std::optional<Mat3> basis;
  for (std::size_t i = 0; i < cands.size() && !basis; ++i) {
    for (std::size_t j = i + 1; j < cands.size() && !basis; ++j) {
      if (cands[i].cross(cands[j]).norm() < 1e-6 * cands[i].norm() * cands[j].norm()) continue;
      for (std::size_t k = j + 1; k < cands.size(); ++k) {
        Mat3 b;
        b.row(0) = cands[i];
        b.row(1) = cands[j];
        b.row(2) = cands[k];
        const double det = b.determinant();
        if (std::abs(std::abs(det) - target) < 1e-3 * target) {
          if (det < 0) b.row(2) = -cands[k];
          basis = b;
          break;
        }
      }
    }
  }
  if (!basis) return niggli_reduce(crystal);

  const Lattice prim(*basis);
  std::vector<Site> kept;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3 f = prim.to_fractional(crystal.cartesian(i));
    bool dup = false;
    for (const Site& k : kept) {
      if (k.element() == sites[i].element() && prim.min_image_distance(f, k.frac()) <= site_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.emplace_back(sites[i].element(), f);
  }
  if (kept.size() * group != m) return niggli_reduce(crystal);
  return niggli_reduce(Crystal(crystal.id(), prim, std::move(kept), crystal.symmetry(),
                               crystal.e_hull()));
}

Crystal apply_isometry(const Crystal& crystal, const Mat3& rotation, const Vec3& translation) {
  if ((rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("rotation matrix is not orthogonal");
  }
  if (!translation.allFinite()) throw InputError("non-finite translation");
  // Rows are vectors: v' = R v  <=>  row' = row R^T.
  Mat3 basis = crystal.lattice().basis() * rotation.transpose();
  if (basis.determinant() < 0) basis = -basis;
  const Lattice lattice(basis);
  std::vector<Site> sites;
  sites.reserve(crystal.size());
  for (std::size_t i = 0; i < crystal.size(); ++i) {
    const Vec3 cart = rotation * crystal.cartesian(i) + translation;
    sites.emplace_back(crystal.sites()[i].element(), lattice.to_fractional(cart));
  }
  return Crystal(crystal.id(), lattice, std::move(sites), crystal.symmetry(), crystal.e_hull());
}

Crystal perturb_sites(const Crystal& crystal, double eps, std::uint64_t seed) {
  if (!(eps >= 0)) throw InputError("perturbation size must be non-negative");
  if (eps == 0) return crystal;
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Site> sites;
  sites.reserve(crystal.size());
  for (std::size_t i = 0; i < crystal.size(); ++i) {
    const double z = 2.0 * unit() - 1.0;
    const double phi = 2.0 * std::numbers::pi * unit();
    const double len = eps * unit();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 shift(len * r * std::cos(phi), len * r * std::sin(phi), len * z);
    sites.emplace_back(crystal.sites()[i].element(),
                       crystal.lattice().to_fractional(crystal.cartesian(i) + shift));
  }
  return Crystal(crystal.id(), crystal.lattice(), std::move(sites), std::nullopt,
                 crystal.e_hull());
}

}  // namespace xtalmet
