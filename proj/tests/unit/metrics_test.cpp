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

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "xtalmet/cell.hpp"
#include "xtalmet/composition.hpp"
#include "xtalmet/error.hpp"
#include "xtalmet/metrics.hpp"

namespace xtalmet {
namespace {

using namespace testing;

constexpr DistanceKind kAllKinds[] = {DistanceKind::smat, DistanceKind::comp, DistanceKind::wyckoff,
                                      DistanceKind::magpie, DistanceKind::amd};

DistanceSpec spec_for(DistanceKind kind) {
  DistanceSpec s;
  s.kind = kind;
  return s;
}

// Fixtures plus rigid copies and random cells: duplicates under every kind.
SampleSet mixed_set(std::uint64_t seed, std::size_t n_random) {
  std::mt19937_64 rng(seed);
  Mat3 r;
  r << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  SampleSet s{"mixed",
              {wz_zno().with_e_hull(0.0), wz_zno_supercell().with_e_hull(0.02),
               rs_zno().with_e_hull(0.25), wz_gan().with_e_hull(0.08),
               apply_isometry(wz_zno(), r, Vec3(0.4, 0.1, 0)).with_e_hull(0.5)}};
  for (std::size_t i = 0; i < n_random; ++i) s.crystals.push_back(random_crystal(rng));
  return s;
}

std::vector<Crystal> kept_crystals(const SampleSet& s, const Screening& sc) {
  std::vector<Crystal> out;
  for (std::size_t i : sc.kept) out.push_back(s.crystals[i]);
  return out;
}

TEST(Kinds, NamesRoundTrip) {
  for (auto k : kAllKinds) EXPECT_EQ(parse_distance_kind(to_string(k)), k);
  EXPECT_THROW(parse_distance_kind("euclid"), InputError);
  EXPECT_TRUE(is_discrete(DistanceKind::wyckoff));
  EXPECT_FALSE(is_discrete(DistanceKind::magpie));
  EXPECT_EQ(parse_denominator("filtered"), Denominator::filtered_set);
  EXPECT_THROW(parse_denominator("half"), InputError);
}

TEST(Screen, KeepsStableSamplesInOrder) {
  const SampleSet s = mixed_set(1, 0);
  ScreenPolicy p;
  p.enabled = true;
  const Screening sc = screen(s, p);
  EXPECT_EQ(sc.kept, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(sc.n_total, 5u);
  EXPECT_EQ(sc.denominator, 5u);
  p.denominator = Denominator::filtered_set;
  EXPECT_EQ(screen(s, p).denominator, 3u);
}

TEST(Screen, MissingEnergies) {
  SampleSet s{"m", {wz_zno(), rs_zno().with_e_hull(0.0)}};
  ScreenPolicy p;
  p.enabled = true;
  const Screening sc = screen(s, p);
  EXPECT_EQ(sc.missing_e_hull, 1u);
  EXPECT_EQ(sc.kept, (std::vector<std::size_t>{1}));
  SampleSet none{"n", {wz_zno(), rs_zno()}};
  EXPECT_THROW(screen(none, p), InputError);
  p.enabled = false;
  EXPECT_EQ(screen(none, p).kept.size(), 2u);
  p.e_hull_max = -0.1;
  EXPECT_THROW(screen(none, p), InputError);
}

TEST(DiscreteUniqueness, ThreeIdentical) {
  const SampleSet s{"i", {wz_zno(), wz_zno(), wz_zno()}};
  for (auto k : {DistanceKind::smat, DistanceKind::comp, DistanceKind::wyckoff}) {
    EXPECT_DOUBLE_EQ(discrete_uniqueness(s, spec_for(k)), 1.0 / 3);
  }
}

TEST(DiscreteUniqueness, GroupingOracleForComp) {
  std::mt19937_64 rng(21);
  RandomCrystalOptions opt;
  opt.elements = {"Li", "O"};
  opt.max_sites = 2;
  const SampleSet s = random_set(rng, 8, opt);
  std::set<std::string> groups;
  for (const auto& c : s.crystals) groups.insert(composition_of(c).reduced_formula());
  EXPECT_DOUBLE_EQ(discrete_uniqueness(s, spec_for(DistanceKind::comp)), groups.size() / 8.0);
}

TEST(ContinuousUniqueness, IdenticalIsZero) {
  const SampleSet s{"i", {wz_zno(), wz_zno(), wz_zno()}};
  EXPECT_EQ(continuous_uniqueness(s, spec_for(DistanceKind::amd)), 0.0);
  EXPECT_EQ(continuous_uniqueness(s, spec_for(DistanceKind::magpie)), 0.0);
}

TEST(ContinuousUniqueness, FourSampleHandSum) {
  const std::vector<Crystal> x = {wz_zno(), rs_zno(), wz_gan(), bi2te3()};
  double total = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) total += d_amd(x[i], x[j]);
  EXPECT_NEAR(continuous_uniqueness(SampleSet{"h", x}, spec_for(DistanceKind::amd)), total / 6, 1e-12);
}

TEST(ContinuousUniqueness, ScreenedWithFullDenominator) {
  const std::vector<Crystal> x = {wz_zno().with_e_hull(0.0), rs_zno().with_e_hull(0.3),
                                  wz_gan().with_e_hull(0.05), bi2te3().with_e_hull(0.4)};
  ScreenPolicy p;
  p.enabled = true;
  const double u = continuous_uniqueness(SampleSet{"s", x}, spec_for(DistanceKind::amd), p);
  EXPECT_NEAR(u, d_amd(x[0], x[2]) / 6, 1e-15);
}

TEST(ContinuousUniqueness, NeedsTwoSamples) {
  EXPECT_THROW(continuous_uniqueness(SampleSet{"one", {wz_zno()}}, spec_for(DistanceKind::amd)),
               InputError);
}

TEST(Metrics, KindMismatchRejected) {
  const SampleSet s{"k", {wz_zno(), rs_zno()}};
  EXPECT_THROW(discrete_uniqueness(s, spec_for(DistanceKind::amd)), InputError);
  EXPECT_THROW(continuous_uniqueness(s, spec_for(DistanceKind::comp)), InputError);
  EXPECT_THROW(discrete_novelty(s, s, spec_for(DistanceKind::magpie)), InputError);
  EXPECT_THROW(continuous_novelty(s, s, spec_for(DistanceKind::smat)), InputError);
}

TEST(DiscreteNovelty, Basics) {
  const SampleSet train{"t", {wz_zno(), rs_zno()}};
  EXPECT_DOUBLE_EQ(discrete_novelty(SampleSet{"s", {wz_zno_supercell()}}, train, spec_for(DistanceKind::smat)), 0.0);
  EXPECT_DOUBLE_EQ(discrete_novelty(SampleSet{"s", {wz_gan(), bi2te3()}}, train, spec_for(DistanceKind::comp)), 1.0);
  EXPECT_THROW(discrete_novelty(train, SampleSet{"e", {}}, spec_for(DistanceKind::comp)), InputError);
}

TEST(ContinuousNovelty, Basics) {
  const SampleSet train{"t", {wz_zno(), rs_zno(), bi2te3()}};
  EXPECT_LE(continuous_novelty(SampleSet{"s", {rs_zno(), wz_zno()}}, train, spec_for(DistanceKind::amd)), 1e-10);
  const double n = continuous_novelty(SampleSet{"s", {wz_gan()}}, train, spec_for(DistanceKind::amd));
  EXPECT_DOUBLE_EQ(n, std::min({d_amd(wz_gan(), wz_zno()), d_amd(wz_gan(), rs_zno()),
                                d_amd(wz_gan(), bi2te3())}));
}

TEST(Oracle, AllKindsMatchDoubleLoops) {
  const SampleSet samples = mixed_set(4, 4);
  const SampleSet train = mixed_set(5, 2);
  for (auto kind : kAllKinds) {
    for (bool screened : {false, true}) {
      for (auto denom : {Denominator::full_set, Denominator::filtered_set}) {
        ScreenPolicy p;
        p.enabled = screened;
        p.denominator = denom;
        const Screening sc = screen(samples, p);
        const auto x = kept_crystals(samples, sc);
        const auto d = pair_distance(kind);
        const auto spec = spec_for(kind);
        SCOPED_TRACE(std::string(to_string(kind)) + (screened ? " screened" : "") +
                     (denom == Denominator::full_set ? " full" : " filtered"));
        if (is_discrete(kind)) {
          EXPECT_DOUBLE_EQ(discrete_uniqueness(samples, spec, p), oracle_discrete_uniqueness(x, d, sc.denominator));
          EXPECT_DOUBLE_EQ(discrete_novelty(samples, train, spec, p),
                           oracle_discrete_novelty(x, train.crystals, d, sc.denominator));
        } else {
          const double u = continuous_uniqueness(samples, spec, p);
          const double nv = continuous_novelty(samples, train, spec, p);
          EXPECT_NEAR(u, oracle_continuous_uniqueness(x, d, sc.denominator), 1e-12 * std::max(1.0, u));
          EXPECT_NEAR(nv, oracle_continuous_novelty(x, train.crystals, d, sc.denominator), 1e-12 * std::max(1.0, nv));
        }
      }
    }
  }
}

TEST(Evaluate, ReportFields) {
  const SampleSet s = mixed_set(6, 0);
  ScreenPolicy p;
  p.enabled = true;
  const MetricReport r = evaluate_uniqueness(s, spec_for(DistanceKind::magpie), p);
  EXPECT_EQ(r.model, "mixed");
  EXPECT_EQ(r.counts.n_total, 5u);
  EXPECT_EQ(r.counts.n_kept, 3u);
  EXPECT_TRUE(r.screened);
  EXPECT_EQ(r.table_hash, ElementTable::bundled().content_hash());
  ASSERT_TRUE(r.uniqueness);
  EXPECT_FALSE(r.novelty);
  const MetricReport n = evaluate_novelty(s, s, spec_for(DistanceKind::comp), {});
  EXPECT_EQ(n.counts.m_train, 5u);
  EXPECT_DOUBLE_EQ(*n.novelty, 0.0);
}

TEST(Evaluate, PrecomputedEmbeddingsGiveSameValue) {
  const SampleSet s = mixed_set(7, 3);
  const auto spec = spec_for(DistanceKind::amd);
  ScreenPolicy p;
  p.enabled = true;
  const EmbeddedSet emb = EmbeddedSet::compute(s.crystals, spec);
  EvaluationOptions o;
  o.sample_embeddings = &emb;
  EXPECT_EQ(*evaluate_uniqueness(s, spec, p, o).uniqueness, *evaluate_uniqueness(s, spec, p).uniqueness);
}

TEST(Determinism, WorkerCountAndOrderDoNotChangeContinuousValues) {
  const SampleSet s = mixed_set(8, 20);
  const SampleSet train = mixed_set(9, 10);
  for (auto kind : {DistanceKind::magpie, DistanceKind::amd}) {
    const auto spec = spec_for(kind);
    const double u1 = continuous_uniqueness(s, spec, {}, 1);
    const double n1 = continuous_novelty(s, train, spec, {}, 1);
    EXPECT_EQ(continuous_uniqueness(s, spec, {}, 8), u1);
    EXPECT_EQ(continuous_novelty(s, train, spec, {}, 8), n1);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      SampleSet shuffled{"x", {}};
      for (std::size_t i : shuffled_order(s.size(), seed)) shuffled.crystals.push_back(s.crystals[i]);
      EXPECT_EQ(continuous_uniqueness(shuffled, spec, {}, 3), u1);
      EXPECT_EQ(continuous_novelty(shuffled, train, spec, {}, 2), n1);
    }
  }
}

TEST(Shuffle, OrderIsAPermutationAndSeeded) {
  const auto a = shuffled_order(50, 1);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_EQ(a, shuffled_order(50, 1));
  EXPECT_NE(a, shuffled_order(50, 2));
  EXPECT_TRUE(shuffled_order(0, 3).empty());
}

TEST(Shuffle, PseudometricKindsHaveZeroSpread) {
  std::mt19937_64 rng(31);
  RandomCrystalOptions opt;
  opt.elements = {"Li", "O", "Zn"};
  opt.max_sites = 3;
  const SampleSet s = random_set(rng, 60, opt);
  const std::uint64_t seeds[] = {0, 1, 2, 3, 4};
  for (auto kind : {DistanceKind::comp, DistanceKind::wyckoff}) {
    const ShuffleAudit a = shuffle_audit(s, spec_for(kind), seeds);
    ASSERT_EQ(a.values.size(), 5u);
    EXPECT_EQ(a.stddev, 0.0);
    for (double v : a.values) EXPECT_EQ(v, a.values[0]);
  }
}

TEST(Shuffle, MatcherChainShowsBothValues) {
  const SmatChain ch = build_smat_chain(chain_base());
  const SampleSet s{"chain", {ch.base, ch.plus, ch.minus}};
  std::vector<std::uint64_t> seeds(12);
  std::iota(seeds.begin(), seeds.end(), 0);
  const ShuffleAudit a = shuffle_audit(s, spec_for(DistanceKind::smat), seeds);
  std::set<double> seen(a.values.begin(), a.values.end());
  EXPECT_EQ(seen, (std::set<double>{1.0 / 3, 2.0 / 3}));
  EXPECT_GT(a.stddev, 0.0);
}

TEST(Shuffle, PopulationStatistics) {
  const SampleSet s{"c", {wz_zno(), rs_zno(), wz_gan()}};
  const std::uint64_t seeds[] = {3, 4};
  const ShuffleAudit a = shuffle_audit(s, spec_for(DistanceKind::comp), seeds);
  EXPECT_DOUBLE_EQ(a.mean, 2.0 / 3);
  EXPECT_EQ(a.seeds, (std::vector<std::uint64_t>{3, 4}));
}

TEST(Shuffle, SingleSeedRejected) {
  const std::uint64_t seeds[] = {0};
  EXPECT_THROW(shuffle_audit(SampleSet{"c", {wz_zno()}}, spec_for(DistanceKind::comp), seeds), InputError);
}

TEST(Pareto, PublishedAmdRow) {
  const auto& rows = published_screened_rows();
  const auto reports = published_reports(rows.back());
  EXPECT_EQ(pareto_front(reports), (std::vector<std::string>{"MatterGen", "Chemeleon-DNG", "ADiT"}));
}

TEST(Pareto, TrivialCasesAndErrors) {
  MetricReport a;
  a.model = "A";
  a.uniqueness = 0.5;
  a.novelty = 0.5;
  EXPECT_EQ(pareto_front(std::vector<MetricReport>{a}), (std::vector<std::string>{"A"}));
  MetricReport b = a;
  b.model = "B";
  EXPECT_EQ(pareto_front(std::vector<MetricReport>{a, b}), (std::vector<std::string>{"A", "B"}));
  MetricReport c = a;
  c.model = "C";
  c.kind = DistanceKind::comp;
  EXPECT_THROW(pareto_front(std::vector<MetricReport>{a, c}), InputError);
  MetricReport d = a;
  d.novelty.reset();
  EXPECT_THROW(pareto_front(std::vector<MetricReport>{d}), InputError);
  EXPECT_THROW(pareto_front(std::vector<MetricReport>{}), InputError);
}

TEST(Pareto, FlagsMatchBruteForceDominance) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> grid(0, 5);
  for (int t = 0; t < 200; ++t) {
    std::vector<ParetoPoint> pts(1 + t % 7);
    for (auto& p : pts) p = {"m", grid(rng) / 5.0, grid(rng) / 5.0};
    const auto flags = pareto_flags(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      bool dominated = false;
      for (const auto& q : pts) {
        const bool ge = q.uniqueness >= pts[i].uniqueness && q.novelty >= pts[i].novelty;
        const bool gt = q.uniqueness > pts[i].uniqueness || q.novelty > pts[i].novelty;
        dominated = dominated || (ge && gt);
      }
      EXPECT_EQ(flags[i], !dominated);
    }
  }
}

}  // namespace
}  // namespace xtalmet
