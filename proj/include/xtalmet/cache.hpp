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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "xtalmet/metrics.hpp"

namespace xtalmet {

std::string sha256_hex(std::string_view bytes);

// SHA-256 of the canonical JSONL serialisation.
std::string sample_set_hash(const SampleSet& samples);

/// Fingerprint matrix for one sample set: rows follow set order.
///
/// On disk (text):
///   # xtalmet-embedding v1
///   # kind=amd
///   # k=100                 (amd)  |  # table=<sha256>  (magpie)
///   # rows=<n> cols=<d>
///   # samples=<sha256>
///   then one comma-separated row per crystal, 17 significant digits.
struct EmbeddingCache {
  DistanceKind kind = DistanceKind::amd;
  int k = 0;
  std::string table_hash;
  std::string sample_hash;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
};

/// kind must be amd or magpie.
EmbeddingCache make_embedding_cache(const SampleSet& samples, const DistanceSpec& spec,
                                    int workers = 1);

void write_embedding_cache(std::ostream& out, const EmbeddingCache& cache);
EmbeddingCache read_embedding_cache(std::istream& in);

/// Throws InputError if the cache was built for a different sample set,
/// distance kind, k or property table.
EmbeddedSet embeddings_from_cache(const EmbeddingCache& cache, const SampleSet& samples,
                                  const DistanceSpec& spec);

}  // namespace xtalmet
