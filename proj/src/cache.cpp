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

#include "xtalmet/cache.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "xtalmet/error.hpp"
#include "xtalmet/io.hpp"

namespace xtalmet {
namespace {

std::string header_value(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("truncated embedding cache");
  const std::string prefix = "# " + std::string(key) + "=";
  if (line.rfind(prefix, 0) != 0) {
    throw InputError("embedding cache: expected '" + prefix + "', got '" + line + "'");
  }
  return line.substr(prefix.size());
}

std::size_t parse_count(const std::string& s, std::string_view what) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("embedding cache: bad " + std::string(what) + " '" + s + "'");
  }
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sample_set_hash(const SampleSet& samples) { return sha256_hex(to_jsonl(samples)); }

EmbeddingCache make_embedding_cache(const SampleSet& samples, const DistanceSpec& spec,
                                    int workers) {
  if (spec.kind != DistanceKind::amd && spec.kind != DistanceKind::magpie) {
    throw InputError("only amd and magpie embeddings can be cached");
  }
  const auto emb = EmbeddedSet::compute(samples.crystals, spec, workers);
  EmbeddingCache c;
  c.kind = spec.kind;
  if (spec.kind == DistanceKind::amd) {
    c.k = spec.k;
  } else {
    c.table_hash = spec.element_table().content_hash();
  }
  c.sample_hash = sample_set_hash(samples);
  c.rows = emb.size();
  c.cols = emb.dim();
  c.data.reserve(c.rows * c.cols);
  for (std::size_t i = 0; i < c.rows; ++i) {
    const auto r = emb.row(i);
    c.data.insert(c.data.end(), r.begin(), r.end());
  }
  return c;
}

void write_embedding_cache(std::ostream& out, const EmbeddingCache& cache) {
  out << "# xtalmet-embedding v1\n";
  out << "# kind=" << to_string(cache.kind) << '\n';
  if (cache.kind == DistanceKind::amd) {
    out << "# k=" << cache.k << '\n';
  } else {
    out << "# table=" << cache.table_hash << '\n';
  }
  out << "# rows=" << cache.rows << " cols=" << cache.cols << '\n';
  out << "# samples=" << cache.sample_hash << '\n';
  for (std::size_t i = 0; i < cache.rows; ++i) {
    std::string line;
    for (std::size_t j = 0; j < cache.cols; ++j) {
      if (j) line += ',';
      line += fmt::format("{:.17g}", cache.data[i * cache.cols + j]);
    }
    out << line << '\n';
  }
}

EmbeddingCache read_embedding_cache(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# xtalmet-embedding v1") {
    throw InputError("not an xtalmet embedding cache");
  }
  EmbeddingCache c;
  c.kind = parse_distance_kind(header_value(in, "kind"));
  if (c.kind == DistanceKind::amd) {
    c.k = static_cast<int>(parse_count(header_value(in, "k"), "k"));
  } else if (c.kind == DistanceKind::magpie) {
    c.table_hash = header_value(in, "table");
  } else {
    throw InputError("embedding cache: unsupported kind");
  }
  const std::string shape = header_value(in, "rows");
  const auto sep = shape.find(" cols=");
  if (sep == std::string::npos) throw InputError("embedding cache: bad shape line");
  c.rows = parse_count(shape.substr(0, sep), "rows");
  c.cols = parse_count(shape.substr(sep + 6), "cols");
  c.sample_hash = header_value(in, "samples");
  c.data.reserve(c.rows * c.cols);
  for (std::size_t i = 0; i < c.rows; ++i) {
    if (!std::getline(in, line)) throw InputError("embedding cache: missing rows");
    std::istringstream row(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(row, cell, ',')) {
      try {
        c.data.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("embedding cache: bad value '" + cell + "'");
      }
      ++n;
    }
    if (n != c.cols) throw InputError("embedding cache: row " + std::to_string(i) + " has wrong width");
  }
  return c;
}

EmbeddedSet embeddings_from_cache(const EmbeddingCache& cache, const SampleSet& samples,
                                  const DistanceSpec& spec) {
  if (cache.kind != spec.kind) throw InputError("embedding cache was built for another distance");
  if (cache.kind == DistanceKind::amd && cache.k != spec.k) {
    throw InputError("embedding cache was built with k=" + std::to_string(cache.k));
  }
  if (cache.kind == DistanceKind::magpie &&
      cache.table_hash != spec.element_table().content_hash()) {
    throw InputError("embedding cache was built with another property table");
  }
  if (cache.rows != samples.size() || cache.sample_hash != sample_set_hash(samples)) {
    throw InputError("embedding cache does not match the sample set");
  }
  return EmbeddedSet::from_vectors(cache.kind, cache.cols, cache.data);
}

}  // namespace xtalmet
