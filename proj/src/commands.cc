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

#include "poshash/commands.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "poshash/errors.h"
#include "poshash/partition.h"

namespace poshash {
namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string join(std::span<const std::int64_t> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += '/';
    s += std::to_string(v[i]);
  }
  return s.empty() ? "-" : s;
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_partition(const PartitionArgs& args, std::ostream& log) {
  if (args.k.has_value() == args.alpha.has_value()) {
    throw ConfigError("partition: give exactly one of --k or --alpha");
  }
  if (args.levels < 1) throw ConfigError("partition.levels: must be >= 1");
  if (args.out.empty()) throw ConfigError("partition.out: required");
  const auto loaded = load_edge_list(args.graph, args.symmetrize);
  const Graph& g = loaded.graph;
  const std::int64_t k =
      args.k ? *args.k : compute_k(g.num_nodes(), *args.alpha);
  if (k < 1) throw ConfigError("partition.k: must be >= 1");

  PartitionHierarchy h;
  if (args.levels == 1) {
    auto r = kway_partition(g, k, args.seed);
    h = PartitionHierarchy(k, g.num_nodes(), {std::move(r.membership)});
  } else {
    if (k < 2) throw ConfigError("partition.k: must be >= 2 when levels > 1");
    h = build_hierarchy(g, k, args.levels, args.seed);
  }
  write_hierarchy_csv(h, args.out);

  log << "nodes " << g.num_nodes() << ", edges " << g.num_edges() << ", k "
      << k << "\n";
  log << "level  parts  edge_cut  balance\n";
  for (std::int32_t j = 0; j < h.num_levels(); ++j) {
    log << std::setw(5) << j << "  " << std::setw(5) << h.level_size(j)
        << "  " << std::setw(8) << edge_cut(g, h.level(j)) << "  "
        << format_g6(partition_balance(h.level(j), h.level_size(j))) << "\n";
  }
  log << "total parts " << h.total_parts() << "\n";
  return 0;
}

int cmd_train(const TrainArgs& args, std::ostream& log) {
  auto config = load_bench_config(args.config);
  if (args.seed) {
    config.train.seed = *args.seed;
    config.partition_seed = *args.seed;
  }
  if (args.threads < 1) throw ConfigError("threads: must be >= 1");
  std::filesystem::create_directories(args.out_dir);

  const auto started = utc_timestamp();
  const auto result = run_benchmark(config, args.threads);
  const auto finished = utc_timestamp();

  std::ostringstream csv;
  write_results_csv(result, csv);
  write_file(args.out_dir / "results.csv", csv.str());
  write_file(args.out_dir / "manifest.json",
             make_manifest(config, result, started, finished).dump(2) + "\n");

  bool all_ok = true;
  for (const auto& r : result.runs) {
    if (!r.ok) {
      all_ok = false;
      log << "run " << r.scheme << " seed " << r.seed
          << " failed: " << r.error << "\n";
    }
  }
  for (const auto& s : result.summary) {
    log << s.scheme << ": " << format_g6(s.mean) << " +- "
        << format_g6(s.stddev) << " (" << s.runs_ok << "/" << s.runs_total
        << " runs, " << s.param_count << " params)\n";
  }
  log << "wrote " << (args.out_dir / "results.csv").string() << "\n";
  return all_ok ? 0 : 4;
}

int cmd_count_params(const std::filesystem::path& config_path,
                     std::ostream& out) {
  const auto config = load_bench_config(config_path);
  const auto rows = count_params(config);
  out << "scheme,kind,param_count,memory_ratio,k,level_sizes,level_dims,c,b,"
         "buckets\n";
  for (const auto& r : rows) {
    out << r.name << ',' << to_string(r.kind) << ',' << r.param_count << ','
        << format_g6(r.memory_ratio) << ',' << r.shape.k << ','
        << join(r.shape.level_sizes) << ',' << join(r.shape.level_dims) << ','
        << r.shape.c << ',' << r.shape.b << ',' << r.shape.buckets << '\n';
  }
  return 0;
}

int cmd_gen_sbm(const SbmSpec& spec, const std::filesystem::path& prefix,
                std::ostream& log) {
  spec.validate("gen-sbm");
  if (prefix.empty()) throw ConfigError("gen-sbm.out: required");
  auto sample = generate_sbm(spec.n, spec.blocks, spec.p_in, spec.p_out,
                             spec.seed);
  if (prefix.has_parent_path()) {
    std::filesystem::create_directories(prefix.parent_path());
  }
  auto edges = prefix;
  edges += ".edges";
  auto labels = prefix;
  labels += ".labels";
  save_edge_list(sample.graph, edges);
  save_labels(sample.dataset, labels);
  log << "wrote " << edges.string() << " (" << sample.graph.num_edges()
      << " edges) and " << labels.string() << "\n";
  return 0;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 3;
  return 1;
}

}  // namespace poshash
