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

// poshash: partition graphs, count embedding parameters, train GCN
// benchmarks and generate SBM graphs.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "poshash/commands.h"

namespace {

std::filesystem::path under(const std::filesystem::path& dir,
                            const std::filesystem::path& p) {
  return p.is_absolute() || dir.empty() ? p : dir / p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position-based hash embeddings for GNN node classification"};
  app.set_version_flag("--version", std::string(poshash::kVersion));
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir;
  app.add_option("--seed", seed, "Random seed (overrides config seeds)");
  app.add_option("--threads", threads, "Worker threads for training runs")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Directory for outputs");

  poshash::PartitionArgs part;
  std::string part_graph, part_out = "hierarchy.csv";
  auto* partition = app.add_subcommand("partition", "Recursive k-way partition");
  partition->add_option("graph", part_graph, "Edge-list file")->required();
  auto* k_opt = partition->add_option("--k", part.k, "Parts per split");
  auto* a_opt = partition->add_option("--alpha", part.alpha, "k = ceil(n^alpha)");
  k_opt->excludes(a_opt);
  partition->add_option("--levels,-L", part.levels, "Hierarchy depth");
  partition->add_option("--out,-o", part_out, "Hierarchy CSV path");
  partition->add_flag("!--no-symmetrize", part.symmetrize,
                      "Require the edge list to be symmetric already");

  std::string train_config;
  auto* train = app.add_subcommand("train", "Run a benchmark config");
  train->add_option("config", train_config, "Config JSON or manifest")
      ->required();

  std::string count_config;
  auto* count = app.add_subcommand("count-params", "Parameter accounting");
  count->add_option("config", count_config, "Config JSON")->required();

  poshash::SbmSpec sbm;
  std::string sbm_out = "sbm";
  auto* gen = app.add_subcommand("gen-sbm", "Write a stochastic block model");
  gen->add_option("--n", sbm.n, "Nodes")->required();
  gen->add_option("--blocks", sbm.blocks, "Blocks")->required();
  gen->add_option("--p-in", sbm.p_in, "Within-block edge probability")
      ->required();
  gen->add_option("--p-out", sbm.p_out, "Cross-block edge probability")
      ->required();
  gen->add_option("--out,-o", sbm_out, "Output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*partition) {
      part.graph = part_graph;
      part.out = under(out_dir, part_out);
      part.seed = seed.value_or(0);
      if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
      return poshash::cmd_partition(part, std::cout);
    }
    if (*train) {
      poshash::TrainArgs args;
      args.config = train_config;
      args.out_dir = out_dir.empty() ? "." : out_dir;
      args.threads = threads;
      args.seed = seed;
      return poshash::cmd_train(args, std::cout);
    }
    if (*count) return poshash::cmd_count_params(count_config, std::cout);
    if (*gen) {
      sbm.seed = seed.value_or(0);
      return poshash::cmd_gen_sbm(sbm, under(out_dir, sbm_out), std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return poshash::exit_code_for(e);
  }
  return 0;
}
