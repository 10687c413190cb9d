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

#ifndef POSHASH_BENCH_H_
#define POSHASH_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "poshash/embedding.h"
#include "poshash/gcn.h"
#include "poshash/graph.h"

namespace poshash {

inline constexpr std::string_view kVersion = "0.1.0";

struct SbmSpec {
  NodeId n = 0;
  std::int32_t blocks = 0;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;

  void validate(std::string_view path = "sbm") const;
};

// Exactly one of: an SBM recipe, edge/label files, or a bare node count
// (shape-only accounting).
struct DatasetSpec {
  std::string name;
  std::optional<SbmSpec> sbm;
  std::filesystem::path edges;
  std::filesystem::path labels;
  bool symmetrize = true;
  std::optional<std::int64_t> num_nodes;
};

struct SchemeEntry {
  std::string name;
  SchemeConfig config;
};

struct BenchConfig {
  DatasetSpec dataset;
  std::int64_t embedding_dim = 64;
  std::vector<SchemeEntry> schemes;
  TrainConfig train;
  std::uint64_t partition_seed = 0;
};

// Relative file paths are resolved against `base_dir`. Errors are
// ConfigError with the JSON path of the offending field.
BenchConfig bench_config_from_json(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir = {});
// Fully resolved snapshot; parsing it back yields an identical config.
nlohmann::json to_json(const BenchConfig& config);
// Accepts a config file or a run manifest (whose "config" is used).
BenchConfig load_bench_config(const std::filesystem::path& path);

struct LoadedData {
  Graph graph;
  LabeledDataset dataset;
  EdgeStats stats;
};

// Materializes the graph and labels. Throws ConfigError for shape-only
// datasets.
LoadedData load_dataset(const DatasetSpec& spec);

struct ParamCountRow {
  std::string name;
  SchemeKind kind;
  SchemeShape shape;
  std::int64_t param_count = 0;
  double memory_ratio = 0.0;
};

// Shapes only, no tables. Graph datasets are partitioned so level sizes are
// exact; node-count datasets use nominal level sizes.
std::vector<ParamCountRow> count_params(const BenchConfig& config);

struct RunRecord {
  std::string scheme;
  std::uint64_t seed = 0;
  std::int64_t param_count = 0;
  double memory_ratio = 0.0;
  bool ok = false;
  std::string error;
  TrainReport report;
  std::vector<UniversalHash> hashes;
};

struct SummaryRecord {
  std::string scheme;
  std::int64_t param_count = 0;
  double memory_ratio = 0.0;
  std::int64_t runs_ok = 0;
  std::int64_t runs_total = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

struct BenchResult {
  std::string dataset;
  std::int64_t epochs = 0;
  std::vector<ParamCountRow> schemes;
  std::vector<RunRecord> runs;  // scheme-major, then repeat order
  std::vector<SummaryRecord> summary;
  nlohmann::json dataset_info;
};

// Trains every (scheme, repeat) pair. Seeds are train.seed + repeat. Runs
// may execute on `threads` workers; the result order is fixed.
BenchResult run_benchmark(const BenchConfig& config, int threads = 1);

SummaryRecord summarize(const std::string& scheme,
                        std::span<const RunRecord> runs);

// Fixed columns, 6 significant digits.
void write_results_csv(const BenchResult& result, std::ostream& out);
nlohmann::json make_manifest(const BenchConfig& config,
                             const BenchResult& result,
                             const std::string& started_at,
                             const std::string& finished_at);

// Formats a double with 6 significant digits.
std::string format_g6(double v);

}  // namespace poshash

#endif  // POSHASH_BENCH_H_
