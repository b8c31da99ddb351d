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

#include "xtalmet/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "xtalmet/cache.hpp"
#include "xtalmet/error.hpp"
#include "xtalmet/io.hpp"
#include "xtalmet/metrics.hpp"
#include "xtalmet/parallel.hpp"
#include "xtalmet/report.hpp"

namespace xtalmet {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string input;
  std::string train;
  std::vector<std::string> reports;
  std::string distance = "amd";
  int k = kDefaultAmdK;
  MatchTolerances tolerances;
  std::optional<double> filter_ehull;
  std::string denominator = "full";
  std::string cache;
  int workers = 1;
  std::string out;
  std::string format = "json";
  int seed_count = 5;
  std::string property_table;
  std::string label;
  std::string log_level = "info";
};

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), stdout_(out) {
    if (cfg_.workers < 1) throw InputError("--workers must be at least 1");
    if (cfg_.format != "json" && cfg_.format != "csv") {
      throw InputError("--format must be json or csv");
    }
    spec_.kind = parse_distance_kind(cfg_.distance);
    spec_.k = cfg_.k;
    spec_.tolerances = cfg_.tolerances;
    if (spec_.kind == DistanceKind::amd && spec_.k < 1) throw InputError("--k must be positive");
    if (spec_.kind == DistanceKind::smat) spec_.tolerances.validate();
    if (!cfg_.property_table.empty()) {
      table_ = ElementTable::load(cfg_.property_table);
      spec_.table = &*table_;
    }
    policy_.enabled = cfg_.filter_ehull.has_value();
    if (cfg_.filter_ehull) policy_.e_hull_max = *cfg_.filter_ehull;
    policy_.denominator = parse_denominator(cfg_.denominator);
    policy_.validate();
  }

  void fingerprint() {
    if (spec_.kind != DistanceKind::amd && spec_.kind != DistanceKind::magpie) {
      throw InputError("fingerprint supports amd and magpie only");
    }
    const SampleSet samples = load_samples();
    const EmbeddingCache cache = make_embedding_cache(samples, spec_, cfg_.workers);
    fs::path target = !cfg_.out.empty() ? fs::path(cfg_.out) : fs::path(cfg_.cache);
    if (target.empty()) {
      const auto dir = cache_dir();
      if (!dir) throw InputError("fingerprint needs --out, --cache or XTALMET_CACHE_DIR");
      fs::create_directories(*dir);
      target = *dir / default_cache_name(samples);
    }
    std::ofstream f(target, std::ios::binary);
    if (!f) throw InputError("cannot write " + target.string());
    write_embedding_cache(f, cache);
    spdlog::info("wrote {}x{} embeddings to {}", cache.rows, cache.cols, target.string());
  }

  void uniqueness() {
    const SampleSet samples = load_samples();
    EvaluationOptions opts{cfg_.workers};
    const auto emb = cached_embeddings(samples, cfg_.cache);
    if (emb) opts.sample_embeddings = &*emb;
    emit_report(evaluate_uniqueness(samples, spec_, policy_, opts));
  }

  void novelty() {
    const SampleSet samples = load_samples();
    const SampleSet train = load_train();
    EvaluationOptions opts{cfg_.workers};
    const auto emb = cached_embeddings(samples, cfg_.cache);
    if (emb) opts.sample_embeddings = &*emb;
    const auto train_emb = cached_embeddings(train, {});
    if (train_emb) opts.train_embeddings = &*train_emb;
    emit_report(evaluate_novelty(samples, train, spec_, policy_, opts));
  }

  void pairwise() {
    const SampleSet samples = load_samples();
    const bool cross = !cfg_.train.empty();
    const SampleSet train = cross ? load_train() : SampleSet{};
    const auto a = EmbeddedSet::compute(samples.crystals, spec_, cfg_.workers);
    const auto b = cross ? EmbeddedSet::compute(train.crystals, spec_, cfg_.workers) : a;
    const std::size_t rows = a.size(), cols = b.size();
    std::vector<double> d(rows * cols);
    parallel_rows(rows, [&](std::size_t i) {
      for (std::size_t j = 0; j < cols; ++j) d[i * cols + j] = a.distance(i, b, j);
    });
    const auto& col_set = cross ? train : samples;
    std::ostringstream s;
    if (cfg_.format == "csv") {
      s << "id";
      for (const auto& c : col_set.crystals) s << ',' << c.id();
      s << '\n';
      for (std::size_t i = 0; i < rows; ++i) {
        s << samples.crystals[i].id();
        for (std::size_t j = 0; j < cols; ++j) s << ',' << fmt::format("{:.17g}", d[i * cols + j]);
        s << '\n';
      }
    } else {
      nlohmann::json j;
      j["distance"] = std::string(to_string(spec_.kind));
      j["rows"] = nlohmann::json::array();
      for (const auto& c : samples.crystals) j["rows"].push_back(c.id());
      j["cols"] = nlohmann::json::array();
      for (const auto& c : col_set.crystals) j["cols"].push_back(c.id());
      j["matrix"] = nlohmann::json::array();
      for (std::size_t i = 0; i < rows; ++i) {
        j["matrix"].push_back(std::vector<double>(d.begin() + i * cols, d.begin() + (i + 1) * cols));
      }
      s << j.dump() << '\n';
    }
    emit(s.str());
  }

  void pareto() {
    std::vector<std::string> files = cfg_.reports;
    if (!cfg_.input.empty()) files.insert(files.begin(), cfg_.input);
    if (files.empty()) throw InputError("pareto needs at least one report file");
    std::vector<MetricReport> merged;
    for (const auto& f : files) {
      for (const auto& r : read_reports(f)) merge_report(merged, r);
    }
    const auto front = pareto_front(merged);
    std::ostringstream s;
    if (cfg_.format == "csv") {
      s << "model,uniqueness,novelty,frontier\n";
      for (const auto& r : merged) {
        const bool on = std::find(front.begin(), front.end(), r.model) != front.end();
        s << r.model << ',' << fmt::format("{:.17g}", *r.uniqueness) << ','
          << fmt::format("{:.17g}", *r.novelty) << ',' << (on ? 1 : 0) << '\n';
      }
    } else {
      nlohmann::json j;
      j["distance"] = std::string(to_string(merged.front().kind));
      j["screened"] = merged.front().screened;
      j["models"] = nlohmann::json::array();
      for (const auto& r : merged) {
        const bool on = std::find(front.begin(), front.end(), r.model) != front.end();
        j["models"].push_back(
            {{"model", r.model}, {"uniqueness", *r.uniqueness}, {"novelty", *r.novelty},
             {"frontier", on}});
      }
      s << j.dump(2) << '\n';
    }
    emit(s.str());
  }

  void shuffle_check() {
    if (cfg_.seed_count < 2) throw InputError("shuffle-check needs --seed-count >= 2");
    const SampleSet samples = load_samples();
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg_.seed_count));
    std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
    const ShuffleAudit audit = shuffle_audit(samples, spec_, seeds, policy_, cfg_.workers);
    std::ostringstream s;
    if (cfg_.format == "csv") {
      s << "seed," << samples.label << '\n';
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        s << seeds[i] << ',' << fmt::format("{:.17g}", audit.values[i]) << '\n';
      }
      s << "mean," << fmt::format("{:.17g}", audit.mean) << '\n';
      s << "std," << fmt::format("{:.17g}", audit.stddev) << '\n';
    } else {
      nlohmann::json j;
      j["model"] = samples.label;
      j["distance"] = std::string(to_string(spec_.kind));
      j["seeds"] = audit.seeds;
      j["values"] = audit.values;
      j["mean"] = audit.mean;
      j["std"] = audit.stddev;
      s << j.dump(2) << '\n';
    }
    emit(s.str());
  }

 private:
  SampleSet load_samples() const {
    if (cfg_.input.empty()) throw InputError("--input is required");
    SampleSet s = load_sample_set(cfg_.input);
    if (!cfg_.label.empty()) s.label = cfg_.label;
    return s;
  }

  SampleSet load_train() const {
    if (cfg_.train.empty()) throw InputError("--train is required");
    try {
      return load_sample_set(cfg_.train);
    } catch (const InputError& e) {
      if (std::string_view(e.what()) == "empty sample set") throw InputError("empty train");
      throw;
    }
  }

  static std::optional<fs::path> cache_dir() {
    const char* dir = std::getenv("XTALMET_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    return fs::path(dir);
  }

  std::string default_cache_name(const SampleSet& samples) const {
    const std::string tag = spec_.kind == DistanceKind::amd
                                ? "amd-k" + std::to_string(spec_.k)
                                : "magpie-" + spec_.element_table().content_hash().substr(0, 12);
    return sample_set_hash(samples).substr(0, 16) + "." + tag + ".emb";
  }

  // Explicit cache files must exist and match. Files under XTALMET_CACHE_DIR
  // are read when present and written otherwise.
  std::optional<EmbeddedSet> cached_embeddings(const SampleSet& samples,
                                               const std::string& explicit_path) const {
    if (spec_.kind != DistanceKind::amd && spec_.kind != DistanceKind::magpie) {
      if (!explicit_path.empty()) throw InputError("--cache applies to amd and magpie only");
      return std::nullopt;
    }
    if (!explicit_path.empty()) {
      std::ifstream f(explicit_path, std::ios::binary);
      if (!f) throw InputError("cannot open cache " + explicit_path);
      return embeddings_from_cache(read_embedding_cache(f), samples, spec_);
    }
    const auto dir = cache_dir();
    if (!dir) return std::nullopt;
    const fs::path path = *dir / default_cache_name(samples);
    if (std::ifstream f(path, std::ios::binary); f) {
      spdlog::debug("reading embeddings from {}", path.string());
      return embeddings_from_cache(read_embedding_cache(f), samples, spec_);
    }
    const EmbeddingCache cache = make_embedding_cache(samples, spec_, cfg_.workers);
    fs::create_directories(*dir);
    std::ofstream f(path, std::ios::binary);
    if (f) write_embedding_cache(f, cache);
    return embeddings_from_cache(cache, samples, spec_);
  }

  template <class Fn>
  void parallel_rows(std::size_t n, Fn&& fn) const {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    parallel_for(n, cfg_.workers, [&](std::size_t i) { fn(idx[i]); });
  }

  static std::vector<MetricReport> read_reports(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open report " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    std::vector<MetricReport> out;
    const std::string text = buf.str();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      // JSONL: one report per line.
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          out.push_back(report_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error& e) {
          throw InputError("malformed report file " + path + ": " + e.what());
        }
      }
      return out;
    }
    if (j.is_array()) {
      for (const auto& r : j) out.push_back(report_from_json(r));
    } else {
      out.push_back(report_from_json(j));
    }
    return out;
  }

  static void merge_report(std::vector<MetricReport>& merged, const MetricReport& r) {
    for (auto& m : merged) {
      if (m.model != r.model || m.kind != r.kind || m.screened != r.screened) continue;
      if (r.uniqueness) m.uniqueness = r.uniqueness;
      if (r.novelty) m.novelty = r.novelty;
      return;
    }
    merged.push_back(r);
  }

  void emit_report(const MetricReport& r) {
    if (cfg_.format == "csv") {
      emit(comparison_csv(std::span<const MetricReport>(&r, 1)));
    } else {
      emit(to_json(r).dump(2) + "\n");
    }
  }

  void emit(const std::string& text) {
    if (cfg_.out.empty()) {
      stdout_ << text;
      return;
    }
    std::ofstream f(cfg_.out, std::ios::binary);
    if (!f) throw InputError("cannot write " + cfg_.out);
    f << text;
  }

  const RunConfig& cfg_;
  std::ostream& stdout_;
  DistanceSpec spec_;
  ScreenPolicy policy_;
  std::optional<ElementTable> table_;
};

void add_shared_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--input", cfg.input, "Sample set (JSONL or CIF)");
  sub.add_option("--train", cfg.train, "Training set (JSONL or CIF)");
  sub.add_option("--distance", cfg.distance, "smat|comp|wyckoff|magpie|amd")
      ->check(CLI::IsMember({"smat", "comp", "wyckoff", "magpie", "amd"}));
  sub.add_option("--k", cfg.k, "AMD neighbour count");
  sub.add_option("--ltol", cfg.tolerances.ltol, "Matcher length tolerance");
  sub.add_option("--stol", cfg.tolerances.stol, "Matcher site tolerance");
  sub.add_option("--angle-tol", cfg.tolerances.angle_tol, "Matcher angle tolerance (deg)");
  sub.add_option("--filter-ehull", cfg.filter_ehull, "Keep samples with e_hull <= E (eV/atom)");
  sub.add_option("--denominator", cfg.denominator, "full|filtered")
      ->check(CLI::IsMember({"full", "filtered"}));
  sub.add_option("--cache", cfg.cache, "Embedding cache file");
  sub.add_option("--workers", cfg.workers, "Worker threads");
  sub.add_option("--out", cfg.out, "Output file (default stdout)");
  sub.add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--seed-count", cfg.seed_count, "Shuffle seeds 0..N-1");
  sub.add_option("--property-table", cfg.property_table, "Element property CSV");
  sub.add_option("--label", cfg.label, "Model label (default: input file stem)");
  sub.add_option("--log-level", cfg.log_level, "trace|debug|info|warn|error|off");
}

class LoggerScope {
 public:
  explicit LoggerScope(std::ostream& err) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("xtalmet", sink);
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  }
  ~LoggerScope() { spdlog::set_default_logger(previous_); }
  LoggerScope(const LoggerScope&) = delete;
  LoggerScope& operator=(const LoggerScope&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  LoggerScope logging(err);
  CLI::App app{"Uniqueness and novelty metrics for generated crystals", "xtalmet"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::map<std::string, CLI::App*> subs;
  for (const char* name :
       {"fingerprint", "uniqueness", "novelty", "pairwise", "pareto", "shuffle-check"}) {
    subs[name] = app.add_subcommand(name);
    add_shared_options(*subs[name], cfg);
  }
  subs["fingerprint"]->description("Precompute an amd or magpie embedding cache");
  subs["uniqueness"]->description("Uniqueness of a sample set");
  subs["novelty"]->description("Novelty of a sample set against a training set");
  subs["pairwise"]->description("Raw distance matrix");
  subs["pareto"]->description("Pareto frontier over metric reports");
  subs["pareto"]->add_option("reports", cfg.reports, "Report files");
  subs["shuffle-check"]->description("Uniqueness under shuffled sample orders");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(cfg.log_level));
    Runner run(cfg, out);
    if (subs["fingerprint"]->parsed()) run.fingerprint();
    if (subs["uniqueness"]->parsed()) run.uniqueness();
    if (subs["novelty"]->parsed()) run.novelty();
    if (subs["pairwise"]->parsed()) run.pairwise();
    if (subs["pareto"]->parsed()) run.pareto();
    if (subs["shuffle-check"]->parsed()) run.shuffle_check();
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace xtalmet
