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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xtalmet/amd.hpp"
#include "xtalmet/cell.hpp"
#include "xtalmet/composition.hpp"
#include "xtalmet/magpie.hpp"
#include "xtalmet/matcher.hpp"
#include "xtalmet/symmetry.hpp"

#include <spdlog/spdlog.h>

namespace xtalmet::testing {
namespace {

// Test binaries log at warn and above.
const bool quiet_logs = [] {
  spdlog::set_level(spdlog::level::warn);
  return true;
}();

Site site(const char* symbol, double x, double y, double z) {
  return Site(Element::from_symbol(symbol), Vec3(x, y, z));
}

Crystal wurtzite(std::string id, const char* cation, const char* anion, double a, double c,
                 double u) {
  const Lattice lat = Lattice::from_parameters(a, a, c, 90, 90, 120);
  std::vector<Site> sites = {
      site(cation, 1.0 / 3, 2.0 / 3, 0.0), site(cation, 2.0 / 3, 1.0 / 3, 0.5),
      site(anion, 1.0 / 3, 2.0 / 3, u), site(anion, 2.0 / 3, 1.0 / 3, 0.5 + u)};
  return Crystal(std::move(id), lat, std::move(sites), SymmetryRecord{186, {"b", "b"}});
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Shortest periodic distance by explicit search over neighbouring images.
double periodic_distance(const Lattice& lat, const Vec3& a, const Vec3& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int l = -2; l <= 2; ++l) {
        const Vec3 d = b - a + Vec3(i, j, l);
        best = std::min(best, lat.to_cartesian(d).norm());
      }
  return best;
}

}  // namespace

Crystal wz_zno() { return wurtzite("wz-ZnO", "Zn", "O", 3.24, 5.22, 0.38); }

Crystal wz_gan() { return wurtzite("wz-GaN", "Ga", "N", 3.19, 5.19, 0.377); }

Crystal rs_zno() {
  const double h = 4.28 / 2;
  Mat3 basis;
  basis << 0, h, h, h, 0, h, h, h, 0;
  return Crystal("rs-ZnO", Lattice(basis), {site("Zn", 0, 0, 0), site("O", 0.5, 0.5, 0.5)},
                 SymmetryRecord{225, {"a", "b"}});
}

Crystal bi2te3() {
  const double zbi = 0.4001, zte = 0.7907;
  const Lattice lat = Lattice::from_parameters(4.386, 4.386, 30.497, 90, 90, 120);
  const Vec3 centring[3] = {{0, 0, 0}, {2.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 2.0 / 3, 2.0 / 3}};
  std::vector<Site> sites;
  for (const Vec3& t : centring) {
    sites.emplace_back(Element::from_symbol("Te"), t);
    for (double z : {zbi, -zbi}) sites.emplace_back(Element::from_symbol("Bi"), t + Vec3(0, 0, z));
    for (double z : {zte, -zte}) sites.emplace_back(Element::from_symbol("Te"), t + Vec3(0, 0, z));
  }
  return Crystal("Bi2Te3", lat, std::move(sites), SymmetryRecord{166, {"a", "c", "c"}});
}

Crystal wz_zno_supercell() { return make_supercell(wz_zno(), 2, 2, 2).with_id("wz-ZnO-222"); }

Crystal chain_base() {
  return perturb_sites(make_supercell(wz_zno(), 2, 2, 1), 0.3, 1).with_id("wz-ZnO-221-noisy");
}

Crystal simple_cubic(double a, const char* element) {
  return Crystal("sc-" + std::string(element), Lattice(Mat3::Identity() * a),
                 {site(element, 0, 0, 0)}, SymmetryRecord{221, {"a"}});
}

Crystal random_crystal(std::mt19937_64& rng, const RandomCrystalOptions& opt) {
  static const SymmetryRecord pool[] = {
      {186, {"b", "b"}}, {225, {"a", "b"}}, {166, {"a", "c", "c"}}, {1, {"a"}},
      {221, {"a"}},      {62, {"c", "c", "d"}}};
  const int pool_size = std::clamp(opt.symmetry_pool, 1, 6);
  for (;;) {
    const Lattice lat = Lattice::from_parameters(
        uniform(rng, 3, 6), uniform(rng, 3, 6), uniform(rng, 3, 6), uniform(rng, 75, 105),
        uniform(rng, 75, 105), uniform(rng, 75, 105));
    const int n = std::uniform_int_distribution<int>(1, opt.max_sites)(rng);
    std::vector<Site> sites;
    int attempts = 0;
    while (static_cast<int>(sites.size()) < n && attempts++ < 200) {
      const Vec3 f(uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1));
      const bool clear = std::all_of(sites.begin(), sites.end(), [&](const Site& s) {
        return periodic_distance(lat, s.frac(), f) >= 1.0;
      });
      if (!clear) continue;
      const auto e = std::uniform_int_distribution<std::size_t>(0, opt.elements.size() - 1)(rng);
      sites.emplace_back(Element::from_symbol(opt.elements[e]), f);
    }
    if (sites.empty()) continue;
    const auto sym = pool[std::uniform_int_distribution<int>(0, pool_size - 1)(rng)];
    const double e_hull = uniform(rng, 0, 0.3);
    return Crystal("rand", lat, std::move(sites), sym, e_hull);
  }
}

SampleSet random_set(std::mt19937_64& rng, std::size_t n, const RandomCrystalOptions& opt) {
  SampleSet s{"random", {}};
  for (std::size_t i = 0; i < n; ++i) {
    s.crystals.push_back(random_crystal(rng, opt).with_id("r" + std::to_string(i)));
  }
  return s;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<Mat3> qr(m);
  Mat3 q = qr.householderQ();
  if (std::bernoulli_distribution(0.5)(rng)) q = -q;
  return q;
}

std::vector<double> brute_force_amd(const Crystal& c, int k) {
  const Mat3& b = c.lattice().basis();
  const double v = c.lattice().volume();
  double h_min = std::numeric_limits<double>::infinity();
  for (int l = 0; l < 3; ++l) {
    const Vec3 n = b.row((l + 1) % 3).transpose().cross(b.row((l + 2) % 3).transpose());
    h_min = std::min(h_min, v / n.norm());
  }
  std::vector<double> amd(k, 0.0);
  const auto& sites = c.sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (int box = 1;; ++box) {
      std::vector<double> d;
      for (int x = -box; x <= box; ++x)
        for (int y = -box; y <= box; ++y)
          for (int z = -box; z <= box; ++z)
            for (std::size_t j = 0; j < sites.size(); ++j) {
              if (j == i && x == 0 && y == 0 && z == 0) continue;
              const Vec3 f = sites[j].frac() + Vec3(x, y, z) - sites[i].frac();
              d.push_back(c.lattice().to_cartesian(f).norm());
            }
      std::sort(d.begin(), d.end());
      // Anything outside the box is at least box * h_min away.
      if (static_cast<int>(d.size()) >= k && d[k - 1] <= box * h_min) {
        for (int j = 0; j < k; ++j) amd[j] += d[j];
        break;
      }
    }
  }
  for (double& x : amd) x /= static_cast<double>(sites.size());
  return amd;
}

double oracle_discrete_uniqueness(const std::vector<Crystal>& x, const PairDistance& d,
                                  std::size_t n) {
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double prod = 1;
    for (std::size_t j = 0; j < i; ++j) prod *= d(x[i], x[j]);
    total += prod;
  }
  return total / static_cast<double>(n);
}

double oracle_continuous_uniqueness(const std::vector<Crystal>& x, const PairDistance& d,
                                    std::size_t n) {
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) total += d(x[i], x[j]);
  return 2.0 * total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double oracle_discrete_novelty(const std::vector<Crystal>& x, const std::vector<Crystal>& y,
                               const PairDistance& d, std::size_t n) {
  double total = 0;
  for (const auto& a : x) {
    double prod = 1;
    for (const auto& b : y) prod *= d(a, b);
    total += prod;
  }
  return total / static_cast<double>(n);
}

double oracle_continuous_novelty(const std::vector<Crystal>& x, const std::vector<Crystal>& y,
                                 const PairDistance& d, std::size_t n) {
  double total = 0;
  for (const auto& a : x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : y) best = std::min(best, d(a, b));
    total += best;
  }
  return total / static_cast<double>(n);
}

PairDistance pair_distance(DistanceKind kind, int k) {
  switch (kind) {
    case DistanceKind::smat:
      return [](const Crystal& a, const Crystal& b) { return double(d_smat(a, b)); };
    case DistanceKind::comp:
      return [](const Crystal& a, const Crystal& b) { return double(d_comp(a, b)); };
    case DistanceKind::wyckoff:
      return [](const Crystal& a, const Crystal& b) { return double(d_wyckoff(a, b)); };
    case DistanceKind::magpie:
      return [](const Crystal& a, const Crystal& b) { return d_magpie(a, b); };
    case DistanceKind::amd:
      return [k](const Crystal& a, const Crystal& b) { return d_amd(a, b, k); };
  }
  return {};
}

const std::array<const char*, 6>& published_models() {
  static const std::array<const char*, 6> m = {"CDVAE",     "DiffCSP",       "DiffCSP++",
                                               "MatterGen", "Chemeleon-DNG", "ADiT"};
  return m;
}

const std::vector<PublishedRow>& published_screened_rows() {
  static const std::vector<PublishedRow> rows = {
      {DistanceKind::smat,
       {0.0346, 0.2885, 0.2723, 0.3517, 0.3747, 0.3164},
       {0.0319, 0.2190, 0.1890, 0.2845, 0.2621, 0.0722}},
      {DistanceKind::comp,
       {0.0341, 0.2775, 0.2646, 0.3372, 0.3599, 0.3089},
       {0.0295, 0.1816, 0.1619, 0.2294, 0.2158, 0.0604}},
      {DistanceKind::wyckoff,
       {0.0021, 0.0209, 0.0423, 0.0371, 0.0439, 0.0033},
       {0.0012, 0.0368, 0.0013, 0.0554, 0.0512, 0.0323}},
      {DistanceKind::magpie,
       {0.0020, 0.1773, 0.1597, 0.2530, 0.2975, 0.2695},
       {0.0031, 0.0160, 0.0133, 0.0188, 0.0168, 0.0038}},
      {DistanceKind::amd,
       {0.0016, 0.1376, 0.1175, 0.2010, 0.2268, 0.1832},
       {0.0075, 0.0222, 0.0168, 0.0396, 0.0258, 0.0431}},
  };
  return rows;
}

std::vector<MetricReport> published_reports(const PublishedRow& row) {
  std::vector<MetricReport> out;
  for (std::size_t i = 0; i < 6; ++i) {
    MetricReport r;
    r.model = published_models()[i];
    r.kind = row.kind;
    r.screened = true;
    r.uniqueness = row.uniqueness[i];
    r.novelty = row.novelty[i];
    out.push_back(r);
  }
  return out;
}

}  // namespace xtalmet::testing
