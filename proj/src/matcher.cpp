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

#include "xtalmet/matcher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <spdlog/spdlog.h>

#include "xtalmet/assignment.hpp"
#include "xtalmet/cell.hpp"
#include "xtalmet/composition.hpp"
#include "xtalmet/error.hpp"

namespace xtalmet {
namespace {

double angle_deg(const Vec3& u, const Vec3& v) {
  const double c = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

struct LatticePoint {
  std::array<int, 3> n;
  Vec3 v;
  double len;
};

struct Mapping {
  Eigen::Matrix3i m;  // rows: integer combinations of the source basis
};

// Integer combinations of `source` whose lengths and angles match `target`.
// Returns nullopt past kMaxLatticeMappings.
std::optional<std::vector<Mapping>> lattice_mappings(const Mat3& target, const Mat3& source,
                                                     const MatchTolerances& tol) {
  const Vec3 len(target.row(0).norm(), target.row(1).norm(), target.row(2).norm());
  const Vec3 ang(angle_deg(target.row(1), target.row(2)), angle_deg(target.row(0), target.row(2)),
                 angle_deg(target.row(0), target.row(1)));
  const double reach = len.maxCoeff() * (1.0 + tol.ltol) * (1.0 + 1e-9);
  const Mat3 recip = source.inverse();
  int n[3];
  for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(std::ceil(reach * recip.col(a).norm()));

  std::array<std::vector<LatticePoint>, 3> cands;
  for (int a = -n[0]; a <= n[0]; ++a) {
    for (int b = -n[1]; b <= n[1]; ++b) {
      for (int c = -n[2]; c <= n[2]; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const Vec3 v = source.transpose() * Vec3(a, b, c);
        const double l = v.norm();
        for (int t = 0; t < 3; ++t) {
          const double ratio = l / len[t];
          if (ratio < 1.0 + tol.ltol && ratio > 1.0 / (1.0 + tol.ltol)) {
            cands[t].push_back({{a, b, c}, v, l});
          }
        }
      }
    }
  }

  std::vector<Mapping> out;
  for (const auto& pa : cands[0]) {
    for (const auto& pb : cands[1]) {
      if (std::abs(angle_deg(pa.v, pb.v) - ang[2]) > tol.angle_tol) continue;
      for (const auto& pc : cands[2]) {
        if (std::abs(angle_deg(pb.v, pc.v) - ang[0]) > tol.angle_tol) continue;
        if (std::abs(angle_deg(pa.v, pc.v) - ang[1]) > tol.angle_tol) continue;
        Mapping mp;
        mp.m << pa.n[0], pa.n[1], pa.n[2], pb.n[0], pb.n[1], pb.n[2], pc.n[0], pc.n[1], pc.n[2];
        const int det = mp.m(0, 0) * (mp.m(1, 1) * mp.m(2, 2) - mp.m(1, 2) * mp.m(2, 1)) -
                        mp.m(0, 1) * (mp.m(1, 0) * mp.m(2, 2) - mp.m(1, 2) * mp.m(2, 0)) +
                        mp.m(0, 2) * (mp.m(1, 0) * mp.m(2, 1) - mp.m(1, 1) * mp.m(2, 0));
        if (std::abs(det) != 1) continue;
        out.push_back(mp);
        if (out.size() > kMaxLatticeMappings) return std::nullopt;
      }
    }
  }
  return out;
}

std::array<double, 6> parameters(const Mat3& basis) {
  return {basis.row(0).norm(),
          basis.row(1).norm(),
          basis.row(2).norm(),
          angle_deg(basis.row(1), basis.row(2)),
          angle_deg(basis.row(0), basis.row(2)),
          angle_deg(basis.row(0), basis.row(1))};
}

// Total order on prepared structures so the comparison runs the same way
// for (a, b) and (b, a).
bool canonical_less(const PreparedStructure& a, const PreparedStructure& b) {
  const auto pa = parameters(a.lattice.basis()), pb = parameters(b.lattice.basis());
  if (pa != pb) return pa < pb;
  if (a.species != b.species) return a.species < b.species;
  for (std::size_t i = 0; i < a.frac.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      if (a.frac[i][c] != b.frac[i][c]) return a.frac[i][c] < b.frac[i][c];
    }
  }
  return false;
}

}  // namespace

void MatchTolerances::validate() const {
  if (!(ltol > 0) || !(stol > 0) || !(angle_tol > 0)) {
    throw InputError("matcher tolerances must be strictly positive");
  }
}

PreparedStructure prepare_for_matching(const Crystal& crystal) {
  const Crystal prim = primitive_reduce(crystal);
  if (prim.size() > kMaxMatcherSites) throw InputError("matcher input too large");
  PreparedStructure p{composition_of(crystal).reduced_formula(), prim.lattice(), {}, {}};
  for (const Site& s : prim.sites()) {
    p.species.push_back(s.element().z());
    p.frac.push_back(s.frac());
  }
  return p;
}

std::optional<double> match_displacement(const PreparedStructure& a, const PreparedStructure& b,
                                         const MatchTolerances& tol,
                                         std::optional<double> stop_below) {
  tol.validate();
  if (a.formula != b.formula || a.frac.size() != b.frac.size()) return std::nullopt;
  const bool swap = canonical_less(b, a);
  const PreparedStructure& s1 = swap ? b : a;
  const PreparedStructure& s2 = swap ? a : b;
  const std::size_t m = s1.frac.size();

  // Bring both cells to their geometric-mean volume.
  const double ratio = std::pow(s2.lattice.volume() / s1.lattice.volume(), 1.0 / 6.0);
  const Mat3 l1 = s1.lattice.basis() * ratio;
  const Mat3 l2 = s2.lattice.basis() / ratio;

  const auto mappings = lattice_mappings(l1, l2, tol);
  if (!mappings) {
    spdlog::warn("structure matcher: more than {} lattice mappings, treating as no match",
                 kMaxLatticeMappings);
    return std::nullopt;
  }
  if (mappings->empty()) return std::nullopt;

  std::map<int, std::vector<std::size_t>> idx1, idx2;
  for (std::size_t i = 0; i < m; ++i) idx1[s1.species[i]].push_back(i);
  for (std::size_t i = 0; i < m; ++i) idx2[s2.species[i]].push_back(i);
  int anchor_z = idx1.begin()->first;
  for (const auto& [z, list] : idx1) {
    if (list.size() < idx1[anchor_z].size()) anchor_z = z;
  }
  const std::size_t anchor = idx1[anchor_z].front();
  const auto p1 = parameters(l1);

  double best = std::numeric_limits<double>::infinity();
  std::vector<Vec3> f2(m), disp(m);
  for (const Mapping& mp : *mappings) {
    const Mat3 md = mp.m.cast<double>();
    const Mat3 l2_aligned = md * l2;
    const Mat3 to_new = md.inverse().transpose();  // column form of f^T M^-1
    for (std::size_t i = 0; i < m; ++i) f2[i] = to_new * s2.frac[i];

    const auto p2 = parameters(l2_aligned);
    std::array<double, 6> avg;
    for (int i = 0; i < 6; ++i) avg[i] = 0.5 * (p1[i] + p2[i]);
    std::optional<Lattice> avg_lattice;
    try {
      avg_lattice = Lattice::from_parameters(avg[0], avg[1], avg[2], avg[3], avg[4], avg[5]);
    } catch (const InputError&) {
      continue;
    }
    const double norm = std::cbrt(avg_lattice->volume() / static_cast<double>(m));

    for (std::size_t j : idx2[anchor_z]) {
      const Vec3 shift = s1.frac[anchor] - f2[j];
      for (const auto& [z, rows] : idx1) {
        const auto& cols = idx2[z];
        if (cols.size() != rows.size()) return std::nullopt;
        const auto k = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd cost(k, k);
        std::vector<Vec3> vec(rows.size() * cols.size());
        for (Eigen::Index r = 0; r < k; ++r) {
          for (Eigen::Index c = 0; c < k; ++c) {
            const Vec3 d = avg_lattice->min_image(f2[cols[c]] + shift - s1.frac[rows[r]]);
            vec[r * k + c] = d;
            cost(r, c) = d.squaredNorm();
          }
        }
        const auto assign = solve_assignment(cost);
        for (Eigen::Index r = 0; r < k; ++r) disp[rows[r]] = vec[r * k + assign[r]];
      }
      Vec3 mean = Vec3::Zero();
      for (const Vec3& d : disp) mean += d;
      mean /= static_cast<double>(m);
      double worst = 0;
      for (const Vec3& d : disp) worst = std::max(worst, (d - mean).norm());
      best = std::min(best, worst / norm);
      if (stop_below && best <= *stop_below) return best;
    }
  }
  return best;
}

int d_smat(const PreparedStructure& a, const PreparedStructure& b, const MatchTolerances& tol) {
  if (a.formula != b.formula) return 1;
  const auto disp = match_displacement(a, b, tol, tol.stol);
  return disp && *disp <= tol.stol ? 0 : 1;
}

int d_smat(const Crystal& a, const Crystal& b, const MatchTolerances& tol) {
  tol.validate();
  if (d_comp(a, b) != 0) return 1;
  return d_smat(prepare_for_matching(a), prepare_for_matching(b), tol);
}

namespace {

std::optional<Crystal> displaced(const Crystal& base, std::size_t site, const Vec3& shift,
                                 const std::string& suffix) {
  std::vector<Site> sites = base.sites();
  const Vec3 cart = base.cartesian(site) + shift;
  sites[site] = Site(sites[site].element(), base.lattice().to_fractional(cart));
  try {
    return Crystal(base.id() + suffix, base.lattice(), std::move(sites), std::nullopt,
                   base.e_hull());
  } catch (const InputError&) {
    return std::nullopt;
  }
}

}  // namespace

SmatChain build_smat_chain(const Crystal& base, const MatchTolerances& tol) {
  tol.validate();
  if (base.size() < 2) throw InputError("chain fixture needs a base with at least two sites");
  const PreparedStructure p0 = prepare_for_matching(base);
  const double scale = std::cbrt(base.lattice().volume() / static_cast<double>(base.size()));

  std::vector<Vec3> directions;
  for (int r = 0; r < 3; ++r) directions.push_back(base.lattice().basis().row(r).normalized());
  for (int r = 0; r < 3; ++r) directions.push_back(Vec3::Unit(r));

  for (std::size_t site = 0; site < base.size(); ++site) {
    for (const Vec3& dir : directions) {
      auto both_match = [&](double delta) {
        auto plus = displaced(base, site, delta * dir, "+");
        auto minus = displaced(base, site, -delta * dir, "-");
        if (!plus || !minus) return false;
        return d_smat(p0, prepare_for_matching(*plus), tol) == 0 &&
               d_smat(p0, prepare_for_matching(*minus), tol) == 0;
      };
      // Linear scan to the first failing delta, then bisection.
      const double step = 0.02 * scale;
      double lo = 0.0, hi = 0.0;
      for (int i = 1; i <= 100; ++i) {
        if (!both_match(i * step)) {
          hi = i * step;
          break;
        }
        lo = i * step;
      }
      if (hi == 0.0 || lo == 0.0) continue;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (both_match(mid) ? lo : hi) = mid;
      }
      auto plus = displaced(base, site, lo * dir, "+");
      auto minus = displaced(base, site, -lo * dir, "-");
      if (!plus || !minus) continue;
      if (d_smat(prepare_for_matching(*plus), prepare_for_matching(*minus), tol) == 1) {
        return SmatChain{base, *plus, *minus, lo};
      }
    }
  }
  throw InputError("no threshold-straddling displacement found for this base");
}

}  // namespace xtalmet
