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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xtalmet/amd.hpp"
#include "xtalmet/magpie.hpp"
#include "xtalmet/matcher.hpp"
#include "xtalmet/structures.hpp"

namespace xtalmet {

enum class DistanceKind { smat, comp, wyckoff, magpie, amd };

std::string_view to_string(DistanceKind kind);
DistanceKind parse_distance_kind(std::string_view name);
// smat, comp and wyckoff return 0/1; magpie and amd are real-valued.
bool is_discrete(DistanceKind kind);

struct DistanceSpec {
  DistanceKind kind = DistanceKind::amd;
  int k = kDefaultAmdK;
  MatchTolerances tolerances;
  const ElementTable* table = nullptr;  // bundled table when null

  const ElementTable& element_table() const {
    return table ? *table : ElementTable::bundled();
  }
};

enum class Denominator { full_set, filtered_set };

std::string_view to_string(Denominator d);
Denominator parse_denominator(std::string_view name);

/// Stability screen. When enabled, samples with e_hull > e_hull_max or no
/// e_hull at all are dropped before aggregation. The denominator n is the
/// full set size unless `filtered_set` is chosen.
struct ScreenPolicy {
  bool enabled = false;
  double e_hull_max = 0.1;
  Denominator denominator = Denominator::full_set;

  void validate() const;
};

struct Screening {
  std::vector<std::size_t> kept;  // indices into the sample set, in order
  std::size_t n_total = 0;
  std::size_t missing_e_hull = 0;
  std::size_t denominator = 0;
};

/// Throws InputError if screening is enabled and no sample carries e_hull.
Screening screen(const SampleSet& samples, const ScreenPolicy& policy);

/// Per-crystal precomputed representation for one distance kind: the reduced
/// formula (comp), symmetry key (wyckoff), fingerprint vector (magpie, amd) or
/// prepared primitive cell (smat). Pairwise distances only touch these.
class EmbeddedSet {
 public:
  static EmbeddedSet compute(std::span<const Crystal> crystals,
                             const DistanceSpec& spec, int workers = 1);
  /// Wraps precomputed fingerprint rows (magpie or amd), row-major.
  static EmbeddedSet from_vectors(DistanceKind kind, std::size_t dim,
                                  std::vector<double> data);

  DistanceKind kind() const { return kind_; }
  std::size_t size() const;
  std::size_t dim() const { return dim_; }
  /// Reduced formula (comp) or symmetry key (wyckoff).
  const std::string& row_key(std::size_t i) const { return keys_[i]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  EmbeddedSet subset(std::span<const std::size_t> indices) const;

  /// d(this[i], other[j]). Both sets must share the kind.
  double distance(std::size_t i, const EmbeddedSet& other, std::size_t j) const;

 private:
  DistanceKind kind_ = DistanceKind::amd;
  MatchTolerances tolerances_;
  std::vector<std::string> keys_;
  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::vector<PreparedStructure> prepared_;
};

// Aggregations over embedded, already-screened samples. `denominator` is the
// n of the metric definitions.
double discrete_uniqueness(const EmbeddedSet& samples, std::size_t denominator,
                           int workers = 1);
double continuous_uniqueness(const EmbeddedSet& samples, std::size_t denominator,
                             int workers = 1);
double discrete_novelty(const EmbeddedSet& samples, const EmbeddedSet& train,
                        std::size_t denominator, int workers = 1);
double continuous_novelty(const EmbeddedSet& samples, const EmbeddedSet& train,
                          std::size_t denominator, int workers = 1);

// Same, starting from crystals: screen, embed, aggregate.
double discrete_uniqueness(const SampleSet& samples, const DistanceSpec& spec,
                           const ScreenPolicy& policy = {}, int workers = 1);
double continuous_uniqueness(const SampleSet& samples, const DistanceSpec& spec,
                             const ScreenPolicy& policy = {}, int workers = 1);
double discrete_novelty(const SampleSet& samples, const SampleSet& train,
                        const DistanceSpec& spec, const ScreenPolicy& policy = {},
                        int workers = 1);
double continuous_novelty(const SampleSet& samples, const SampleSet& train,
                          const DistanceSpec& spec, const ScreenPolicy& policy = {},
                          int workers = 1);

struct MetricCounts {
  std::size_t n_total = 0;
  std::size_t n_kept = 0;
  std::size_t m_train = 0;
  std::size_t missing_e_hull = 0;
};

struct StageTimings {
  double embedding_seconds = 0.0;
  double pairwise_seconds = 0.0;
};

struct MetricReport {
  std::string model;
  DistanceKind kind = DistanceKind::amd;
  int k = kDefaultAmdK;                // amd only
  MatchTolerances tolerances;          // smat only
  std::string table_hash;              // magpie only
  bool screened = false;
  double e_hull_max = 0.1;
  Denominator denominator = Denominator::full_set;
  std::optional<double> uniqueness;
  std::optional<double> novelty;
  MetricCounts counts;
  StageTimings timings;  // not serialised
};

struct EvaluationOptions {
  int workers = 1;
  // Precomputed embeddings of the full (unscreened) sets, e.g. from a cache.
  const EmbeddedSet* sample_embeddings = nullptr;
  const EmbeddedSet* train_embeddings = nullptr;
};

MetricReport evaluate_uniqueness(const SampleSet& samples, const DistanceSpec& spec,
                                 const ScreenPolicy& policy,
                                 const EvaluationOptions& options = {});
MetricReport evaluate_novelty(const SampleSet& samples, const SampleSet& train,
                              const DistanceSpec& spec, const ScreenPolicy& policy,
                              const EvaluationOptions& options = {});

/// Permutation of [0, n) used by the shuffle audit: mt19937_64 seeded with
/// `seed`, Fisher-Yates from the back, each swap index drawn uniformly from
/// [0, i] by rejection sampling on the raw 64-bit output.
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

struct ShuffleAudit {
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

/// Discrete uniqueness of the set under each seed's permutation. Needs at
/// least two seeds.
ShuffleAudit shuffle_audit(const SampleSet& samples, const DistanceSpec& spec,
                           std::span<const std::uint64_t> seeds,
                           const ScreenPolicy& policy = {}, int workers = 1);

struct ParetoPoint {
  std::string model;
  double uniqueness = 0.0;
  double novelty = 0.0;
};

/// Flag per point: true when no other point is >= in both coordinates and >
/// in at least one. Mutually equal points are all kept.
std::vector<bool> pareto_flags(std::span<const ParetoPoint> points);

/// Pareto-optimal model labels, in input order. Reports must share distance
/// kind and screening and carry both uniqueness and novelty.
std::vector<std::string> pareto_front(std::span<const MetricReport> reports);

}  // namespace xtalmet
