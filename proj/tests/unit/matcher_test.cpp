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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "xtalmet/assignment.hpp"
#include "xtalmet/cell.hpp"
#include "xtalmet/error.hpp"
#include "xtalmet/matcher.hpp"
#include "xtalmet/metrics.hpp"

namespace xtalmet {
namespace {

using namespace testing;

TEST(Assignment, MatchesPermutationSearch) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 6;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = u(rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0;
      for (int i = 0; i < n; ++i) s += cost(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto a = solve_assignment(cost);
    double got = 0;
    for (int i = 0; i < n; ++i) got += cost(i, a[i]);
    EXPECT_NEAR(got, best, 1e-9);
  }
}

TEST(Tolerances, MustBePositive) {
  EXPECT_THROW((MatchTolerances{0.0, 0.3, 5.0}.validate()), InputError);
  EXPECT_THROW((MatchTolerances{0.2, -1, 5.0}.validate()), InputError);
  EXPECT_NO_THROW(MatchTolerances{}.validate());
}

TEST(DSmat, ReferencePairs) {
  EXPECT_EQ(d_smat(wz_zno(), wz_zno_supercell()), 0);
  EXPECT_EQ(d_smat(wz_zno(), rs_zno()), 1);
  EXPECT_EQ(d_smat(wz_zno(), wz_gan()), 1);
  EXPECT_EQ(d_smat(wz_zno(), bi2te3()), 1);
  EXPECT_EQ(d_smat(bi2te3(), bi2te3()), 0);
}

TEST(DSmat, Symmetric) {
  const Crystal all[] = {wz_zno(), rs_zno(), wz_zno_supercell(), bi2te3()};
  for (const auto& a : all)
    for (const auto& b : all) EXPECT_EQ(d_smat(a, b), d_smat(b, a)) << a.id() << " " << b.id();
}

TEST(DSmat, RigidMotionInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 20; ++t) {
    const Crystal& base = t % 2 ? wz_zno() : bi2te3();
    const Crystal moved = apply_isometry(base, random_rotation(rng), Vec3(u(rng), u(rng), u(rng)));
    EXPECT_EQ(d_smat(base, moved), 0);
  }
}

TEST(DSmat, ToleratesSmallNoise) {
  EXPECT_EQ(d_smat(wz_zno(), perturb_sites(wz_zno(), 0.02, 1)), 0);
}

TEST(DSmat, VolumeScaledMatch) {
  const Crystal x = wz_zno();
  const Crystal y("expanded", Lattice(x.lattice().basis() * 1.05), x.sites());
  EXPECT_EQ(d_smat(x, y), 0);
}

TEST(DSmat, LargeInputRejected) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  const Lattice lat(Mat3::Identity() * 20.0);
  std::vector<Site> sites;
  while (sites.size() <= kMaxMatcherSites) {
    const Vec3 f(u(rng), u(rng), u(rng));
    const bool clear = std::all_of(sites.begin(), sites.end(), [&](const Site& s) {
      return lat.min_image_distance(s.frac(), f) > 1.0;
    });
    if (clear) sites.emplace_back(Element(sites.size() % 3 ? 8 : 14), f);
  }
  EXPECT_THROW(prepare_for_matching(Crystal("big", lat, sites)), InputError);
}

TEST(SmatChain, DistancePattern) {
  const SmatChain ch = build_smat_chain(chain_base());
  EXPECT_GT(ch.delta, 0.0);
  EXPECT_EQ(d_smat(ch.base, ch.plus), 0);
  EXPECT_EQ(d_smat(ch.base, ch.minus), 0);
  EXPECT_EQ(d_smat(ch.plus, ch.minus), 1);
}

TEST(SmatChain, WurtziteCellRealignsBothDisplacements) {
  EXPECT_THROW(build_smat_chain(wz_zno()), InputError);
}

TEST(SmatChain, OneSiteBaseRejected) {
  EXPECT_THROW(build_smat_chain(simple_cubic(3.0)), InputError);
}

TEST(SmatChain, UniquenessDependsOnOrder) {
  const SmatChain ch = build_smat_chain(chain_base());
  DistanceSpec spec;
  spec.kind = DistanceKind::smat;
  const SampleSet forward{"f", {ch.base, ch.plus, ch.minus}};
  const SampleSet reordered{"r", {ch.plus, ch.minus, ch.base}};
  EXPECT_DOUBLE_EQ(discrete_uniqueness(forward, spec), 1.0 / 3);
  EXPECT_DOUBLE_EQ(discrete_uniqueness(reordered, spec), 2.0 / 3);
}

}  // namespace
}  // namespace xtalmet
