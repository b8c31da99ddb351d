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

#include "xtalmet/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "xtalmet/composition.hpp"
#include "xtalmet/error.hpp"
#include "xtalmet/exact_sum.hpp"
#include "xtalmet/parallel.hpp"
#include "xtalmet/symmetry.hpp"

namespace xtalmet {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool keyed(DistanceKind kind) {
  return kind == DistanceKind::comp || kind == DistanceKind::wyckoff;
}

void require_discrete(DistanceKind kind) {
  if (!is_discrete(kind)) {
    throw InputError("distance '" + std::string(to_string(kind)) +
                     "' is continuous; discrete metrics need smat, comp or wyckoff");
  }
}

void require_continuous(DistanceKind kind) {
  if (is_discrete(kind)) {
    throw InputError("distance '" + std::string(to_string(kind)) +
                     "' is discrete; continuous metrics need magpie or amd");
  }
}

std::vector<Crystal> pick(const SampleSet& samples, const std::vector<std::size_t>& indices) {
  std::vector<Crystal> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(samples.crystals[i]);
  return out;
}

constexpr std::size_t kTile = 8;

// L-infinity distances from kTile rows a[] to one row b. Each b element is
// loaded once for the whole tile.
void linf_tile(const double* const a[kTile], const double* b, std::size_t dim, double out[kTile]) {
  double m[kTile][2] = {};
  std::size_t t = 0;
  for (; t + 2 <= dim; t += 2) {
    for (std::size_t r = 0; r < kTile; ++r) {
      for (int l = 0; l < 2; ++l) {
        const double d = std::abs(a[r][t + l] - b[t + l]);
        m[r][l] = d > m[r][l] ? d : m[r][l];
      }
    }
  }
  for (std::size_t r = 0; r < kTile; ++r) {
    if (t < dim) m[r][0] = std::max(m[r][0], std::abs(a[r][t] - b[t]));
    out[r] = std::max(m[r][0], m[r][1]);
  }
}

// Row sums of the strict lower triangle of the AMD distance matrix.
void amd_row_sums(const EmbeddedSet& samples, std::vector<ExactSum>& rows, int workers) {
  const std::size_t n = samples.size(), dim = samples.dim();
  parallel_for((n + kTile - 1) / kTile, workers, [&](std::size_t block) {
    const std::size_t i0 = kTile * block, i1 = std::min(n, i0 + kTile);
    if (i1 - i0 == kTile) {
      const double* a[kTile];
      for (std::size_t r = 0; r < kTile; ++r) a[r] = samples.row(i0 + r).data();
      double d[kTile];
      for (std::size_t j = 0; j < i0; ++j) {
        linf_tile(a, samples.row(j).data(), dim, d);
        for (std::size_t r = 0; r < kTile; ++r) rows[i0 + r].add(d[r]);
      }
    } else {
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = 0; j < i0; ++j) rows[i].add(linf_distance(samples.row(i), samples.row(j)));
      }
    }
    for (std::size_t i = i0; i < i1; ++i) {
      for (std::size_t j = i0; j < i; ++j) rows[i].add(linf_distance(samples.row(i), samples.row(j)));
    }
  });
}

}  // namespace

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::smat: return "smat";
    case DistanceKind::comp: return "comp";
    case DistanceKind::wyckoff: return "wyckoff";
    case DistanceKind::magpie: return "magpie";
    case DistanceKind::amd: return "amd";
  }
  return "?";
}

DistanceKind parse_distance_kind(std::string_view name) {
  for (auto k : {DistanceKind::smat, DistanceKind::comp, DistanceKind::wyckoff,
                 DistanceKind::magpie, DistanceKind::amd}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown distance kind '" + std::string(name) + "'");
}

bool is_discrete(DistanceKind kind) {
  return kind == DistanceKind::smat || kind == DistanceKind::comp ||
         kind == DistanceKind::wyckoff;
}

std::string_view to_string(Denominator d) {
  return d == Denominator::full_set ? "full" : "filtered";
}

Denominator parse_denominator(std::string_view name) {
  if (name == "full") return Denominator::full_set;
  if (name == "filtered") return Denominator::filtered_set;
  throw InputError("unknown denominator policy '" + std::string(name) + "'");
}

void ScreenPolicy::validate() const {
  if (!(e_hull_max >= 0)) throw InputError("e_hull_max must be non-negative");
}

Screening screen(const SampleSet& samples, const ScreenPolicy& policy) {
  policy.validate();
  Screening s;
  s.n_total = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& e = samples.crystals[i].e_hull();
    if (!policy.enabled) {
      s.kept.push_back(i);
    } else if (!e) {
      ++s.missing_e_hull;
    } else if (*e <= policy.e_hull_max) {
      s.kept.push_back(i);
    }
  }
  if (policy.enabled && s.n_total > 0 && s.missing_e_hull == s.n_total) {
    throw InputError("screening requested but no sample has e_hull");
  }
  if (s.missing_e_hull > 0) {
    spdlog::warn("{} of {} samples lack e_hull and were excluded by screening", s.missing_e_hull,
                 s.n_total);
  }
  s.denominator = policy.denominator == Denominator::full_set ? s.n_total : s.kept.size();
  return s;
}

// ------------------------------------------------------------ EmbeddedSet

EmbeddedSet EmbeddedSet::compute(std::span<const Crystal> crystals, const DistanceSpec& spec,
                                 int workers) {
  EmbeddedSet e;
  e.kind_ = spec.kind;
  e.tolerances_ = spec.tolerances;
  const std::size_t n = crystals.size();
  switch (spec.kind) {
    case DistanceKind::comp:
      e.keys_.resize(n);
      parallel_for(n, workers,
                   [&](std::size_t i) { e.keys_[i] = composition_of(crystals[i]).reduced_formula(); });
      break;
    case DistanceKind::wyckoff:
      e.keys_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!crystals[i].symmetry()) {
          throw InputError("symmetry metadata required for d_wyckoff (crystal '" +
                           crystals[i].id() + "')");
        }
        e.keys_[i] = symmetry_key(*crystals[i].symmetry());
      }
      break;
    case DistanceKind::magpie: {
      const ElementTable& table = spec.element_table();
      e.dim_ = kMagpieLength;
      e.data_.resize(n * e.dim_);
      parallel_for(n, workers, [&](std::size_t i) {
        const auto v = magpie_fingerprint(composition_of(crystals[i]), table);
        std::copy(v.values.begin(), v.values.end(), e.data_.begin() + i * e.dim_);
      });
      break;
    }
    case DistanceKind::amd:
      if (spec.k < 1) throw InputError("k must be positive");
      e.dim_ = static_cast<std::size_t>(spec.k);
      e.data_.resize(n * e.dim_);
      parallel_for(n, workers, [&](std::size_t i) {
        const auto v = amd_vector(crystals[i], spec.k);
        std::copy(v.values().begin(), v.values().end(), e.data_.begin() + i * e.dim_);
      });
      break;
    case DistanceKind::smat: {
      spec.tolerances.validate();
      std::vector<std::optional<PreparedStructure>> prepared(n);
      parallel_for(n, workers,
                   [&](std::size_t i) { prepared[i] = prepare_for_matching(crystals[i]); });
      e.prepared_.reserve(n);
      for (auto& p : prepared) e.prepared_.push_back(std::move(*p));
      break;
    }
  }
  return e;
}

EmbeddedSet EmbeddedSet::from_vectors(DistanceKind kind, std::size_t dim,
                                      std::vector<double> data) {
  if (kind != DistanceKind::amd && kind != DistanceKind::magpie) {
    throw InputError("only amd and magpie embeddings are vectors");
  }
  if (dim == 0 || data.size() % dim != 0) throw InputError("embedding matrix shape mismatch");
  EmbeddedSet e;
  e.kind_ = kind;
  e.dim_ = dim;
  e.data_ = std::move(data);
  return e;
}

std::size_t EmbeddedSet::size() const {
  switch (kind_) {
    case DistanceKind::comp:
    case DistanceKind::wyckoff: return keys_.size();
    case DistanceKind::smat: return prepared_.size();
    default: return dim_ == 0 ? 0 : data_.size() / dim_;
  }
}

EmbeddedSet EmbeddedSet::subset(std::span<const std::size_t> indices) const {
  EmbeddedSet e;
  e.kind_ = kind_;
  e.tolerances_ = tolerances_;
  e.dim_ = dim_;
  for (std::size_t i : indices) {
    if (i >= size()) throw std::out_of_range("embedding index out of range");
    if (!keys_.empty()) e.keys_.push_back(keys_[i]);
    if (!prepared_.empty()) e.prepared_.push_back(prepared_[i]);
    if (dim_ > 0) e.data_.insert(e.data_.end(), data_.begin() + i * dim_, data_.begin() + (i + 1) * dim_);
  }
  return e;
}

double EmbeddedSet::distance(std::size_t i, const EmbeddedSet& other, std::size_t j) const {
  if (other.kind_ != kind_) throw InputError("embeddings of different distance kinds");
  switch (kind_) {
    case DistanceKind::comp:
    case DistanceKind::wyckoff: return keys_[i] == other.keys_[j] ? 0.0 : 1.0;
    case DistanceKind::smat: return d_smat(prepared_[i], other.prepared_[j], tolerances_);
    case DistanceKind::magpie: return l2_distance(row(i), other.row(j));
    case DistanceKind::amd: return linf_distance(row(i), other.row(j));
  }
  return 0.0;
}

// ----------------------------------------------------------- aggregation

double discrete_uniqueness(const EmbeddedSet& samples, std::size_t denominator, int workers) {
  require_discrete(samples.kind());
  const std::size_t n = samples.size();
  if (n == 0 || denominator == 0) {
    spdlog::warn("discrete uniqueness over an empty sample set is 0");
    return 0.0;
  }
  std::vector<char> unique(n, 0);
  if (keyed(samples.kind())) {
    // Equality of keys is transitive: first occurrence of each key counts.
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) unique[i] = seen.insert(samples.row_key(i)).second;
  } else {
    parallel_for(n, workers, [&](std::size_t i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (samples.distance(i, samples, j) == 0.0) return;
      }
      unique[i] = 1;
    });
  }
  const auto count = std::count(unique.begin(), unique.end(), 1);
  return static_cast<double>(count) / static_cast<double>(denominator);
}

double continuous_uniqueness(const EmbeddedSet& samples, std::size_t denominator, int workers) {
  require_continuous(samples.kind());
  if (denominator < 2) throw InputError("continuous uniqueness needs n >= 2");
  const std::size_t n = samples.size();
  std::vector<ExactSum> rows(n);
  if (samples.kind() == DistanceKind::amd) {
    amd_row_sums(samples, rows, workers);
  } else {
    parallel_for(n, workers, [&](std::size_t i) {
      for (std::size_t j = 0; j < i; ++j) rows[i].add(samples.distance(i, samples, j));
    });
  }
  ExactSum total;
  for (const auto& r : rows) total.merge(r);
  const double pairs = 0.5 * static_cast<double>(denominator) * static_cast<double>(denominator - 1);
  return total.value() / pairs;
}

double discrete_novelty(const EmbeddedSet& samples, const EmbeddedSet& train,
                        std::size_t denominator, int workers) {
  require_discrete(samples.kind());
  if (train.size() == 0) throw InputError("empty train");
  const std::size_t n = samples.size();
  if (n == 0 || denominator == 0) {
    spdlog::warn("discrete novelty over an empty sample set is 0");
    return 0.0;
  }
  std::vector<char> novel(n, 0);
  if (keyed(samples.kind())) {
    std::unordered_set<std::string> known;
    for (std::size_t j = 0; j < train.size(); ++j) known.insert(train.row_key(j));
    for (std::size_t i = 0; i < n; ++i) novel[i] = !known.contains(samples.row_key(i));
  } else {
    parallel_for(n, workers, [&](std::size_t i) {
      for (std::size_t j = 0; j < train.size(); ++j) {
        if (samples.distance(i, train, j) == 0.0) return;
      }
      novel[i] = 1;
    });
  }
  const auto count = std::count(novel.begin(), novel.end(), 1);
  return static_cast<double>(count) / static_cast<double>(denominator);
}

double continuous_novelty(const EmbeddedSet& samples, const EmbeddedSet& train,
                          std::size_t denominator, int workers) {
  require_continuous(samples.kind());
  if (train.size() == 0) throw InputError("empty train");
  const std::size_t n = samples.size();
  if (n == 0 || denominator == 0) {
    spdlog::warn("continuous novelty over an empty sample set is 0");
    return 0.0;
  }
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < train.size(); ++j) {
      nearest[i] = std::min(nearest[i], samples.distance(i, train, j));
    }
  });
  ExactSum total;
  for (double d : nearest) total.add(d);
  return total.value() / static_cast<double>(denominator);
}

// -------------------------------------------------------------- reports

MetricReport evaluate_uniqueness(const SampleSet& samples, const DistanceSpec& spec,
                                 const ScreenPolicy& policy, const EvaluationOptions& options) {
  const Screening sc = screen(samples, policy);
  MetricReport r;
  r.model = samples.label;
  r.kind = spec.kind;
  r.k = spec.k;
  r.tolerances = spec.tolerances;
  if (spec.kind == DistanceKind::magpie) r.table_hash = spec.element_table().content_hash();
  r.screened = policy.enabled;
  r.e_hull_max = policy.e_hull_max;
  r.denominator = policy.denominator;
  r.counts = {sc.n_total, sc.kept.size(), 0, sc.missing_e_hull};

  auto t0 = Clock::now();
  const EmbeddedSet emb = options.sample_embeddings
                              ? options.sample_embeddings->subset(sc.kept)
                              : EmbeddedSet::compute(pick(samples, sc.kept), spec, options.workers);
  r.timings.embedding_seconds = seconds_since(t0);

  t0 = Clock::now();
  r.uniqueness = is_discrete(spec.kind)
                     ? discrete_uniqueness(emb, sc.denominator, options.workers)
                     : continuous_uniqueness(emb, sc.denominator, options.workers);
  r.timings.pairwise_seconds = seconds_since(t0);
  spdlog::info("uniqueness[{}] {}: embedding stage {:.3f} s, pairwise stage {:.3f} s",
               to_string(spec.kind), r.model, r.timings.embedding_seconds,
               r.timings.pairwise_seconds);
  return r;
}

MetricReport evaluate_novelty(const SampleSet& samples, const SampleSet& train,
                              const DistanceSpec& spec, const ScreenPolicy& policy,
                              const EvaluationOptions& options) {
  if (train.empty()) throw InputError("empty train");
  const Screening sc = screen(samples, policy);
  MetricReport r;
  r.model = samples.label;
  r.kind = spec.kind;
  r.k = spec.k;
  r.tolerances = spec.tolerances;
  if (spec.kind == DistanceKind::magpie) r.table_hash = spec.element_table().content_hash();
  r.screened = policy.enabled;
  r.e_hull_max = policy.e_hull_max;
  r.denominator = policy.denominator;
  r.counts = {sc.n_total, sc.kept.size(), train.size(), sc.missing_e_hull};

  auto t0 = Clock::now();
  const EmbeddedSet emb = options.sample_embeddings
                              ? options.sample_embeddings->subset(sc.kept)
                              : EmbeddedSet::compute(pick(samples, sc.kept), spec, options.workers);
  const EmbeddedSet train_emb = options.train_embeddings
                                    ? *options.train_embeddings
                                    : EmbeddedSet::compute(train.crystals, spec, options.workers);
  r.timings.embedding_seconds = seconds_since(t0);

  t0 = Clock::now();
  r.novelty = is_discrete(spec.kind)
                  ? discrete_novelty(emb, train_emb, sc.denominator, options.workers)
                  : continuous_novelty(emb, train_emb, sc.denominator, options.workers);
  r.timings.pairwise_seconds = seconds_since(t0);
  spdlog::info("novelty[{}] {}: embedding stage {:.3f} s, pairwise stage {:.3f} s",
               to_string(spec.kind), r.model, r.timings.embedding_seconds,
               r.timings.pairwise_seconds);
  return r;
}

double discrete_uniqueness(const SampleSet& samples, const DistanceSpec& spec,
                           const ScreenPolicy& policy, int workers) {
  require_discrete(spec.kind);
  return *evaluate_uniqueness(samples, spec, policy, {workers}).uniqueness;
}

double continuous_uniqueness(const SampleSet& samples, const DistanceSpec& spec,
                             const ScreenPolicy& policy, int workers) {
  require_continuous(spec.kind);
  return *evaluate_uniqueness(samples, spec, policy, {workers}).uniqueness;
}

double discrete_novelty(const SampleSet& samples, const SampleSet& train, const DistanceSpec& spec,
                        const ScreenPolicy& policy, int workers) {
  require_discrete(spec.kind);
  return *evaluate_novelty(samples, train, spec, policy, {workers}).novelty;
}

double continuous_novelty(const SampleSet& samples, const SampleSet& train,
                          const DistanceSpec& spec, const ScreenPolicy& policy, int workers) {
  require_continuous(spec.kind);
  return *evaluate_novelty(samples, train, spec, policy, {workers}).novelty;
}

// ------------------------------------------------------- shuffle audit

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    const std::uint64_t range = i + 1;
    const std::uint64_t threshold = (0 - range) % range;  // 2^64 mod range
    std::uint64_t r;
    do {
      r = rng();
    } while (r < threshold);
    std::swap(order[i], order[r % range]);
  }
  return order;
}

ShuffleAudit shuffle_audit(const SampleSet& samples, const DistanceSpec& spec,
                           std::span<const std::uint64_t> seeds, const ScreenPolicy& policy,
                           int workers) {
  require_discrete(spec.kind);
  if (seeds.size() < 2) throw InputError("shuffle audit needs at least two seeds");
  const Screening sc = screen(samples, policy);
  const EmbeddedSet emb = EmbeddedSet::compute(pick(samples, sc.kept), spec, workers);
  std::vector<std::optional<std::size_t>> position(samples.size());
  for (std::size_t p = 0; p < sc.kept.size(); ++p) position[sc.kept[p]] = p;

  ShuffleAudit audit;
  audit.seeds.assign(seeds.begin(), seeds.end());
  for (std::uint64_t seed : seeds) {
    std::vector<std::size_t> order;
    for (std::size_t i : shuffled_order(samples.size(), seed)) {
      if (position[i]) order.push_back(*position[i]);
    }
    audit.values.push_back(discrete_uniqueness(emb.subset(order), sc.denominator, workers));
  }
  // Shifted by the first value: identical values give mean == value, std == 0.
  const double n = static_cast<double>(audit.values.size());
  const double v0 = audit.values.front();
  double shift = 0;
  for (double v : audit.values) shift += v - v0;
  audit.mean = v0 + shift / n;
  double ss = 0;
  for (double v : audit.values) ss += (v - audit.mean) * (v - audit.mean);
  audit.stddev = std::sqrt(ss / n);
  return audit;
}

// --------------------------------------------------------------- Pareto

std::vector<bool> pareto_flags(std::span<const ParetoPoint> points) {
  std::vector<bool> flags(points.size(), true);
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t l = 0; l < points.size() && flags[k]; ++l) {
      if (l == k) continue;
      const auto& a = points[l];
      const auto& b = points[k];
      if (a.uniqueness >= b.uniqueness && a.novelty >= b.novelty &&
          (a.uniqueness > b.uniqueness || a.novelty > b.novelty)) {
        flags[k] = false;
      }
    }
  }
  return flags;
}

std::vector<std::string> pareto_front(std::span<const MetricReport> reports) {
  if (reports.empty()) throw InputError("Pareto comparison needs at least one report");
  std::vector<ParetoPoint> points;
  for (const auto& r : reports) {
    if (r.kind != reports.front().kind) throw InputError("reports mix distance kinds");
    if (r.screened != reports.front().screened) throw InputError("reports mix screening");
    if (!r.uniqueness || !r.novelty) {
      throw InputError("report for '" + r.model + "' lacks uniqueness or novelty");
    }
    points.push_back({r.model, *r.uniqueness, *r.novelty});
  }
  const auto flags = pareto_flags(points);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (flags[i]) out.push_back(points[i].model);
  }
  return out;
}

}  // namespace xtalmet
