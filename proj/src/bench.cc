// Copyright 2026 The PosHashEmb Authors.
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

#include "poshash/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <utility>

#include "poshash/errors.h"
#include "poshash/partition.h"
#include "poshash/random.h"

namespace poshash {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(path + "." + key, "unknown field");
    }
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

template <typename T>
T get(const json& j, const std::string& path, std::string_view key,
      std::optional<T> fallback = std::nullopt) {
  const auto it = j.find(std::string(key));
  const std::string field = path + "." + std::string(key);
  if (it == j.end()) {
    if (fallback) return *fallback;
    fail(field, "required field missing");
  }
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) fail(field, "expected a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) fail(field, "expected a string");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) fail(field, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (it->is_number_integer() && !it->is_number_unsigned() &&
          it->get<std::int64_t>() < 0) {
        fail(field, "must be non-negative");
      }
    }
  } else {
    if (!it->is_number()) fail(field, "expected a number");
  }
  return it->get<T>();
}

std::filesystem::path resolve_path(const std::string& p,
                                   const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return std::filesystem::absolute(path).lexically_normal();
}

bool valid_name(const std::string& name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                  c == '-' || c == '.' || c == '+';
         });
}

std::int64_t dataset_nodes(const DatasetSpec& spec) {
  if (spec.num_nodes) return *spec.num_nodes;
  if (spec.sbm) return spec.sbm->n;
  return -1;
}

// Builds each distinct (k, L) hierarchy once.
class HierarchyCache {
 public:
  HierarchyCache(const Graph& g, std::uint64_t seed) : graph_(g), seed_(seed) {}

  std::shared_ptr<const PartitionHierarchy> get(std::int64_t k,
                                                std::int32_t levels) {
    const auto key = std::make_pair(k, levels);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      auto h = std::make_shared<const PartitionHierarchy>(
          build_hierarchy(graph_, k, levels, seed_));
      it = cache_.emplace(key, std::move(h)).first;
    }
    return it->second;
  }

 private:
  const Graph& graph_;
  std::uint64_t seed_;
  std::map<std::pair<std::int64_t, std::int32_t>,
           std::shared_ptr<const PartitionHierarchy>>
      cache_;
};

std::shared_ptr<const PartitionHierarchy> hierarchy_for(
    const SchemeConfig& c, std::int64_t n, HierarchyCache& cache) {
  if (!needs_hierarchy(c.kind)) return nullptr;
  return cache.get(resolve_k(c, n), c.levels);
}

ParamCountRow make_row(const SchemeEntry& entry, std::int64_t n,
                       std::int64_t embedding_dim,
                       const PartitionHierarchy* hierarchy) {
  ParamCountRow row;
  row.name = entry.name;
  row.kind = entry.config.kind;
  row.shape = resolve_shape(entry.config, n,
                            hierarchy ? hierarchy->level_sizes()
                                      : std::span<const PartId>{});
  row.param_count = row.shape.param_count();
  row.memory_ratio = static_cast<double>(row.param_count) /
                     (static_cast<double>(n) *
                      static_cast<double>(embedding_dim));
  return row;
}

json shape_to_json(const SchemeShape& s) {
  json j{{"k", s.k},
         {"level_sizes", s.level_sizes},
         {"level_dims", s.level_dims},
         {"c", s.c},
         {"b", s.b},
         {"buckets", s.buckets},
         {"hashes", s.num_hashes}};
  auto tables = json::array();
  for (const auto& t : s.tables) {
    tables.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  }
  j["tables"] = std::move(tables);
  return j;
}

}  // namespace

void SbmSpec::validate(std::string_view path) const {
  const std::string p(path);
  if (n < 1) fail(p + ".n", "must be positive");
  if (blocks < 1) fail(p + ".blocks", "must be positive");
  if (n < blocks) fail(p + ".n", "must be at least the number of blocks");
  if (!(p_in >= 0.0 && p_in <= 1.0)) fail(p + ".p_in", "must lie in [0, 1]");
  if (!(p_out >= 0.0 && p_out <= 1.0)) fail(p + ".p_out", "must lie in [0, 1]");
  if (p_out > p_in) fail(p + ".p_out", "must not exceed p_in");
}

BenchConfig bench_config_from_json(const json& j,
                                   const std::filesystem::path& base_dir) {
  require_object(j, "config");
  reject_unknown(j, "config",
                 {"dataset", "embedding_dim", "schemes", "train",
                  "partition_seed"});
  BenchConfig c;
  try {
    c.embedding_dim =
        get<std::int64_t>(j, "config", "embedding_dim", c.embedding_dim);
    if (c.embedding_dim < 1) fail("config.embedding_dim", "must be positive");
    c.partition_seed =
        get<std::uint64_t>(j, "config", "partition_seed", c.partition_seed);

    if (!j.contains("dataset")) fail("config.dataset", "required field missing");
    const auto& d = require_object(j.at("dataset"), "config.dataset");
    reject_unknown(d, "config.dataset",
                   {"name", "sbm", "edges", "labels", "symmetrize",
                    "num_nodes"});
    c.dataset.name = get<std::string>(d, "config.dataset", "name",
                                      std::string("dataset"));
    if (!valid_name(c.dataset.name)) {
      fail("config.dataset.name", "use letters, digits, '_', '-', '.', '+'");
    }
    const int sources = static_cast<int>(d.contains("sbm")) +
                        static_cast<int>(d.contains("edges")) +
                        static_cast<int>(d.contains("num_nodes"));
    if (sources != 1) {
      fail("config.dataset",
           "give exactly one of 'sbm', 'edges' (+ 'labels') or 'num_nodes'");
    }
    if (d.contains("sbm")) {
      const std::string p = "config.dataset.sbm";
      const auto& s = require_object(d.at("sbm"), p);
      reject_unknown(s, p, {"n", "blocks", "p_in", "p_out", "seed"});
      SbmSpec sbm;
      sbm.n = get<NodeId>(s, p, "n");
      sbm.blocks = get<std::int32_t>(s, p, "blocks");
      sbm.p_in = get<double>(s, p, "p_in");
      sbm.p_out = get<double>(s, p, "p_out");
      sbm.seed = get<std::uint64_t>(s, p, "seed", std::uint64_t{0});
      sbm.validate(p);
      c.dataset.sbm = sbm;
    } else if (d.contains("edges")) {
      c.dataset.edges =
          resolve_path(get<std::string>(d, "config.dataset", "edges"), base_dir);
      c.dataset.labels = resolve_path(
          get<std::string>(d, "config.dataset", "labels"), base_dir);
      c.dataset.symmetrize =
          get<bool>(d, "config.dataset", "symmetrize", true);
    } else {
      const auto n = get<std::int64_t>(d, "config.dataset", "num_nodes");
      if (n < 1) fail("config.dataset.num_nodes", "must be positive");
      c.dataset.num_nodes = n;
    }

    if (j.contains("train")) {
      const std::string p = "config.train";
      const auto& t = require_object(j.at("train"), p);
      reject_unknown(t, p,
                     {"lr", "epochs", "weight_decay", "seed", "repeats",
                      "hidden", "bias", "dropout"});
      auto& tc = c.train;
      tc.lr = get<double>(t, p, "lr", tc.lr);
      tc.epochs = get<std::int64_t>(t, p, "epochs", tc.epochs);
      tc.weight_decay = get<double>(t, p, "weight_decay", tc.weight_decay);
      tc.seed = get<std::uint64_t>(t, p, "seed", tc.seed);
      tc.repeats = get<std::int64_t>(t, p, "repeats", tc.repeats);
      tc.hidden = get<std::int64_t>(t, p, "hidden", tc.hidden);
      tc.bias = get<bool>(t, p, "bias", tc.bias);
      tc.dropout = get<double>(t, p, "dropout", tc.dropout);
    }
    c.train.validate();

    if (!j.contains("schemes") || !j.at("schemes").is_array() ||
        j.at("schemes").empty()) {
      fail("config.schemes", "expected a non-empty array");
    }
    std::set<std::string> names;
    const auto& schemes = j.at("schemes");
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      const std::string p = "config.schemes[" + std::to_string(i) + "]";
      json s = require_object(schemes[i], p);
      if (!s.contains("dim")) s["dim"] = c.embedding_dim;
      SchemeEntry entry;
      entry.config = scheme_config_from_json(s, p);
      entry.name = get<std::string>(s, p, "name",
                                    std::string(to_string(entry.config.kind)));
      if (!valid_name(entry.name)) {
        fail(p + ".name", "use letters, digits, '_', '-', '.', '+'");
      }
      if (!names.insert(entry.name).second) {
        fail(p + ".name", "duplicate scheme name '" + entry.name +
                              "'; set a distinct 'name'");
      }
      c.schemes.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

json to_json(const BenchConfig& c) {
  json d{{"name", c.dataset.name}};
  if (c.dataset.sbm) {
    const auto& s = *c.dataset.sbm;
    d["sbm"] = {{"n", s.n},
                {"blocks", s.blocks},
                {"p_in", s.p_in},
                {"p_out", s.p_out},
                {"seed", s.seed}};
  } else if (c.dataset.num_nodes) {
    d["num_nodes"] = *c.dataset.num_nodes;
  } else {
    d["edges"] = c.dataset.edges.string();
    d["labels"] = c.dataset.labels.string();
    d["symmetrize"] = c.dataset.symmetrize;
  }
  auto schemes = json::array();
  for (const auto& s : c.schemes) {
    auto e = to_json(s.config);
    e["name"] = s.name;
    schemes.push_back(std::move(e));
  }
  const auto& t = c.train;
  return {{"dataset", std::move(d)},
          {"embedding_dim", c.embedding_dim},
          {"partition_seed", c.partition_seed},
          {"train",
           {{"lr", t.lr},
            {"epochs", t.epochs},
            {"weight_decay", t.weight_decay},
            {"seed", t.seed},
            {"repeats", t.repeats},
            {"hidden", t.hidden},
            {"bias", t.bias},
            {"dropout", t.dropout}}},
          {"schemes", std::move(schemes)}};
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("config")) fail("manifest", "missing 'config' snapshot");
    return bench_config_from_json(j.at("config"), {});
  }
  return bench_config_from_json(j, path.parent_path());
}

LoadedData load_dataset(const DatasetSpec& spec) {
  LoadedData out;
  if (spec.sbm) {
    const auto& s = *spec.sbm;
    auto sample = generate_sbm(s.n, s.blocks, s.p_in, s.p_out, s.seed);
    out.graph = std::move(sample.graph);
    out.dataset = std::move(sample.dataset);
  } else if (!spec.edges.empty()) {
    auto loaded = load_edge_list(spec.edges, spec.symmetrize);
    out.dataset = load_labels(spec.labels, loaded.original_ids);
    out.graph = std::move(loaded.graph);
    out.stats = loaded.stats;
  } else {
    throw ConfigError("config.dataset: shape-only dataset cannot be trained on");
  }
  return out;
}

std::vector<ParamCountRow> count_params(const BenchConfig& config) {
  std::vector<ParamCountRow> rows;
  const bool any_hierarchy =
      std::any_of(config.schemes.begin(), config.schemes.end(),
                  [](const auto& s) { return needs_hierarchy(s.config.kind); });
  if (config.dataset.num_nodes || !any_hierarchy) {
    std::int64_t n = dataset_nodes(config.dataset);
    if (n < 0) n = load_edge_list(config.dataset.edges,
                                  config.dataset.symmetrize)
                       .graph.num_nodes();
    for (const auto& s : config.schemes) {
      rows.push_back(make_row(s, n, config.embedding_dim, nullptr));
    }
    return rows;
  }
  const auto data = load_dataset(config.dataset);
  HierarchyCache cache(data.graph, config.partition_seed);
  const std::int64_t n = data.graph.num_nodes();
  for (const auto& s : config.schemes) {
    const auto h = hierarchy_for(s.config, n, cache);
    rows.push_back(make_row(s, n, config.embedding_dim, h.get()));
  }
  return rows;
}

SummaryRecord summarize(const std::string& scheme,
                        std::span<const RunRecord> runs) {
  SummaryRecord s;
  s.scheme = scheme;
  s.runs_total = static_cast<std::int64_t>(runs.size());
  std::vector<double> acc;
  for (const auto& r : runs) {
    s.param_count = r.param_count;
    s.memory_ratio = r.memory_ratio;
    if (r.ok) acc.push_back(r.report.test_accuracy);
  }
  s.runs_ok = static_cast<std::int64_t>(acc.size());
  if (acc.empty()) return s;
  double sum = 0.0;
  for (double a : acc) sum += a;
  s.mean = sum / static_cast<double>(acc.size());
  double sq = 0.0;
  for (double a : acc) sq += (a - s.mean) * (a - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(acc.size()));
  return s;
}

BenchResult run_benchmark(const BenchConfig& config, int threads) {
  config.train.validate();
  const auto data = load_dataset(config.dataset);
  const auto adj = normalized_adjacency(data.graph);
  const std::int64_t n = data.graph.num_nodes();

  BenchResult result;
  result.dataset = config.dataset.name;
  result.epochs = config.train.epochs;
  result.dataset_info = {{"num_nodes", n},
                         {"num_edges", data.graph.num_edges()},
                         {"num_classes", data.dataset.num_classes},
                         {"self_loops_dropped", data.stats.self_loops_dropped},
                         {"duplicates_dropped", data.stats.duplicates_dropped}};

  HierarchyCache cache(data.graph, config.partition_seed);
  std::vector<std::shared_ptr<const PartitionHierarchy>> hierarchies;
  for (const auto& s : config.schemes) {
    hierarchies.push_back(hierarchy_for(s.config, n, cache));
    result.schemes.push_back(
        make_row(s, n, config.embedding_dim, hierarchies.back().get()));
  }

  struct Job {
    std::size_t scheme;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < config.schemes.size(); ++s) {
    for (std::int64_t r = 0; r < config.train.repeats; ++r) {
      jobs.push_back({s, config.train.seed + static_cast<std::uint64_t>(r)});
    }
  }
  result.runs.resize(jobs.size());

  auto run_job = [&](std::size_t index) {
    const auto& job = jobs[index];
    const auto& entry = config.schemes[job.scheme];
    auto& rec = result.runs[index];
    rec.scheme = entry.name;
    rec.seed = job.seed;
    rec.param_count = result.schemes[job.scheme].param_count;
    rec.memory_ratio = result.schemes[job.scheme].memory_ratio;
    try {
      SchemeContext ctx;
      ctx.num_nodes = static_cast<NodeId>(n);
      ctx.seed = derive_seed(job.seed, "scheme");
      ctx.hierarchy = hierarchies[job.scheme];
      auto scheme = make_scheme(entry.config, ctx);
      GcnModel model(scheme->dim(), config.train.hidden,
                     data.dataset.num_classes, derive_seed(job.seed, "model"),
                     config.train.bias);
      TrainConfig tc = config.train;
      tc.seed = job.seed;
      rec.hashes = scheme->hash_functions();
      rec.report = train(adj, data.dataset, *scheme, model, tc);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w) {
      pool.emplace_back([&] {
        for (auto i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
          run_job(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  const auto repeats = static_cast<std::size_t>(config.train.repeats);
  for (std::size_t s = 0; s < config.schemes.size(); ++s) {
    result.summary.push_back(summarize(
        config.schemes[s].name,
        std::span<const RunRecord>(result.runs).subspan(s * repeats, repeats)));
  }
  return result;
}

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_results_csv(const BenchResult& result, std::ostream& out) {
  out << "row_type,dataset,scheme,seed,param_count,memory_ratio,"
         "test_accuracy,test_accuracy_std,epochs,status\n";
  for (const auto& r : result.runs) {
    out << "run," << result.dataset << ',' << r.scheme << ',' << r.seed << ','
        << r.param_count << ',' << format_g6(r.memory_ratio) << ','
        << (r.ok ? format_g6(r.report.test_accuracy) : "") << ",,"
        << result.epochs << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
  for (const auto& s : result.summary) {
    const bool any = s.runs_ok > 0;
    const char* status = s.runs_ok == s.runs_total ? "ok"
                         : any                     ? "partial"
                                                   : "failed";
    out << "summary," << result.dataset << ',' << s.scheme << ",,"
        << s.param_count << ',' << format_g6(s.memory_ratio) << ','
        << (any ? format_g6(s.mean) : "") << ','
        << (any ? format_g6(s.stddev) : "") << ',' << result.epochs << ','
        << status << '\n';
  }
}

json make_manifest(const BenchConfig& config, const BenchResult& result,
                   const std::string& started_at,
                   const std::string& finished_at) {
  auto schemes = json::array();
  for (const auto& row : result.schemes) {
    schemes.push_back({{"name", row.name},
                       {"kind", to_string(row.kind)},
                       {"param_count", row.param_count},
                       {"memory_ratio", row.memory_ratio},
                       {"derived", shape_to_json(row.shape)}});
  }
  auto runs = json::array();
  for (const auto& r : result.runs) {
    json run{{"scheme", r.scheme},
             {"seed", r.seed},
             {"status", r.ok ? "ok" : "failed"},
             {"param_count", r.param_count},
             {"memory_ratio", r.memory_ratio}};
    if (r.ok) {
      run["test_accuracy"] = r.report.test_accuracy;
      run["best_valid_accuracy"] = r.report.best_valid_accuracy;
      run["best_epoch"] = r.report.best_epoch;
      run["final_train_loss"] = r.report.train_loss.back();
      run["model_params"] = r.report.model_params;
      run["wall_seconds"] = r.report.wall_seconds;
    } else {
      run["error"] = r.error;
    }
    auto hashes = json::array();
    for (const auto& f : r.hashes) {
      hashes.push_back({{"a", f.a}, {"b", f.b}, {"m", f.m}});
    }
    run["hashes"] = std::move(hashes);
    runs.push_back(std::move(run));
  }
  auto summary = json::array();
  for (const auto& s : result.summary) {
    summary.push_back({{"scheme", s.scheme},
                       {"runs_ok", s.runs_ok},
                       {"runs_total", s.runs_total},
                       {"mean_test_accuracy", s.mean},
                       {"std_test_accuracy", s.stddev}});
  }
  return {{"manifest_version", 1},
          {"tool", "poshash"},
          {"version", kVersion},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"config", to_json(config)},
          {"dataset", result.dataset_info},
          {"schemes", std::move(schemes)},
          {"runs", std::move(runs)},
          {"summary", std::move(summary)}};
}

}  // namespace poshash
