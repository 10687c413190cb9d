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

#ifndef POSHASH_COMMANDS_H_
#define POSHASH_COMMANDS_H_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "poshash/bench.h"

namespace poshash {

struct PartitionArgs {
  std::filesystem::path graph;
  std::optional<std::int64_t> k;
  std::optional<double> alpha;
  std::int32_t levels = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  bool symmetrize = true;
};

// Writes the hierarchy CSV to args.out and a per-level summary to `log`.
int cmd_partition(const PartitionArgs& args, std::ostream& log);

struct TrainArgs {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  int threads = 1;
  // Overrides train.seed and partition_seed.
  std::optional<std::uint64_t> seed;
};

// Writes out_dir/results.csv and out_dir/manifest.json. Returns 4 when any
// run failed, 0 otherwise.
int cmd_train(const TrainArgs& args, std::ostream& log);

int cmd_count_params(const std::filesystem::path& config, std::ostream& out);

// Validates before touching the filesystem; writes prefix.edges and
// prefix.labels.
int cmd_gen_sbm(const SbmSpec& spec, const std::filesystem::path& prefix,
                std::ostream& log);

// 2 config, 3 data / IO, 4 numeric, 1 anything else.
int exit_code_for(const std::exception& e);

std::string utc_timestamp();

}  // namespace poshash

#endif  // POSHASH_COMMANDS_H_
