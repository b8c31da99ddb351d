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

#include "xtalmet/amd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "xtalmet/error.hpp"

namespace xtalmet {
namespace {

constexpr double kMaxRadius = 1e3;

}  // namespace

AmdVector::AmdVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("AMD vector needs k >= 1");
  if (!(values_[0] > 0)) throw InputError("AMD vector: coincident atoms (zero distance)");
  for (std::size_t j = 1; j < values_.size(); ++j) {
    if (values_[j] < values_[j - 1]) throw InputError("AMD vector must be non-decreasing");
  }
}

std::vector<std::vector<double>> neighbor_distances(const Crystal& crystal, int k) {
  if (k < 1) throw InputError("k must be positive");
  const Lattice& lat = crystal.lattice();
  const std::size_t m = crystal.size();
  std::vector<Vec3> pos(m);
  for (std::size_t i = 0; i < m; ++i) pos[i] = crystal.cartesian(i);

  double spread = 0;  // max |p_i - p_j|
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) spread = std::max(spread, (pos[i] - pos[j]).norm());
  }
  const double max_len = lat.lengths().maxCoeff();
  // Reciprocal row norms bound |n_i| <= R * |a_i*| for |sum n_i a_i| <= R.
  const Mat3 recip = lat.basis().inverse();
  const Vec3 recip_norms(recip.col(0).norm(), recip.col(1).norm(), recip.col(2).norm());

  double radius =
      2.0 * std::cbrt(k * lat.volume() / (4.0 * std::numbers::pi * static_cast<double>(m) / 3.0)) +
      max_len;

  std::vector<std::vector<double>> out(m);
  std::vector<double> found;
  for (;;) {
    if (radius > kMaxRadius) {
      throw std::runtime_error("neighbour search radius exceeds 1e3 A (cell too sparse for k=" +
                               std::to_string(k) + ")");
    }
    // Every point p_j + T within `radius` of some p_i has |T| <= radius + spread.
    const double reach = radius + spread;
    int n[3];
    for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(std::ceil(reach * recip_norms[a]));
    std::vector<Vec3> shifts;
    for (int a = -n[0]; a <= n[0]; ++a) {
      for (int b = -n[1]; b <= n[1]; ++b) {
        for (int c = -n[2]; c <= n[2]; ++c) {
          const Vec3 t = lat.to_cartesian(Vec3(a, b, c));
          if (t.norm() <= reach) shifts.push_back(t);
        }
      }
    }
    const double r2 = radius * radius;
    bool complete = true;
    for (std::size_t i = 0; i < m && complete; ++i) {
      found.clear();
      for (const Vec3& t : shifts) {
        const bool origin = t.squaredNorm() == 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (origin && j == i) continue;
          const double d2 = (pos[j] + t - pos[i]).squaredNorm();
          if (d2 <= r2) found.push_back(d2);
        }
      }
      if (found.size() < static_cast<std::size_t>(k)) {
        complete = false;
        break;
      }
      std::partial_sort(found.begin(), found.begin() + k, found.end());
      out[i].resize(k);
      for (int j = 0; j < k; ++j) out[i][j] = std::sqrt(found[j]);
    }
    if (complete) return out;
    radius *= 2.0;
  }
}

AmdVector amd_vector(const Crystal& crystal, int k) {
  const auto dists = neighbor_distances(crystal, k);
  std::vector<double> mean(k, 0.0);
  for (const auto& row : dists) {
    for (int j = 0; j < k; ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(dists.size());
  return AmdVector(std::move(mean));
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("fingerprint lengths differ");
  const std::size_t n = a.size();
  double m[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = std::abs(a[i + l] - b[i + l]);
      m[l] = d > m[l] ? d : m[l];
    }
  }
  for (; i < n; ++i) m[0] = std::max(m[0], std::abs(a[i] - b[i]));
  return std::max(std::max(m[0], m[1]), std::max(m[2], m[3]));
}

double d_amd(const AmdVector& a, const AmdVector& b) {
  if (a.k() != b.k()) throw InputError("AMD vectors have different k");
  return linf_distance(a.values(), b.values());
}

double d_amd(const Crystal& a, const Crystal& b, int k) {
  return d_amd(amd_vector(a, k), amd_vector(b, k));
}

}  // namespace xtalmet
