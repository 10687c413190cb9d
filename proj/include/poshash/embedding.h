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

#ifndef POSHASH_EMBEDDING_H_
#define POSHASH_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "poshash/graph.h"
#include "poshash/hashing.h"
#include "poshash/matrix.h"
#include "poshash/partition.h"

namespace poshash {

// A trainable matrix with its gradient accumulator. Embedding tables are
// sparse: backward marks the rows it touched and the optimizer only updates
// those.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool sparse = false;
  // Decoupled weight decay applies (false for importance weights).
  bool decay = true;
  std::vector<std::uint8_t> touched;

  Parameter() = default;
  Parameter(std::string name, std::size_t rows, std::size_t cols, bool sparse,
            bool decay = true);

  void zero_grad();
  void mark(std::size_t row) {
    if (sparse) touched[row] = 1;
  }
};

enum class SchemeKind {
  kFullEmb,
  kHashTrick,
  kBloom,
  kHashEmb,
  kDhe,
  kPosEmb,
  kPosFullEmb,
  kPosHashEmbIntra,
  kPosHashEmbInter,
  kRandomPart,
};

std::string_view to_string(SchemeKind kind);
// Throws ConfigError for unknown names.
SchemeKind parse_scheme_kind(std::string_view name);
bool needs_hierarchy(SchemeKind kind);

struct DheSettings {
  std::int64_t encoding_width = 1024;
  std::int32_t hidden_layers = 1;
  std::int64_t hidden_width = 2000;
  std::int64_t buckets = 1'000'000;

  friend bool operator==(const DheSettings&, const DheSettings&) = default;
};

struct SchemeConfig {
  SchemeKind kind = SchemeKind::kFullEmb;
  std::int64_t dim = 64;
  // B for HashTrick, Bloom and HashEmb.
  std::int64_t buckets = 0;
  // h; HashTrick and RandomPart always use one function.
  std::int64_t num_hashes = 2;
  // Partition count is `k` when positive, otherwise compute_k(n, alpha).
  double alpha = 0.25;
  std::int64_t k = 0;
  std::int32_t levels = 3;
  double lambda = 1.0;
  // Intra per-partition bucket count; 0 means ceil(sqrt(n / m0)).
  std::int64_t c = 0;
  // Inter bucket count; 0 means c * m0.
  std::int64_t b = 0;
  DheSettings dhe;

  // Throws ConfigError naming the offending field.
  void validate(std::string_view path = "scheme") const;

  friend bool operator==(const SchemeConfig&, const SchemeConfig&) = default;
};

nlohmann::json to_json(const SchemeConfig& config);
// Missing fields take their defaults; errors carry `path` as prefix.
SchemeConfig scheme_config_from_json(const nlohmann::json& j,
                                     std::string_view path = "scheme");

// Resolved table shapes of a scheme, computable without allocating anything.
struct SchemeShape {
  struct Table {
    std::string name;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
  };
  std::int64_t k = 0;                        // partitions per split
  std::vector<std::int64_t> level_sizes;     // m_j
  std::vector<std::int64_t> level_dims;      // d_j
  std::int64_t c = 0;
  std::int64_t b = 0;
  std::int64_t buckets = 0;
  std::int64_t num_hashes = 0;
  std::vector<Table> tables;

  std::int64_t param_count() const;
};

// Partition count used by position schemes and RandomPart.
std::int64_t resolve_k(const SchemeConfig& config, std::int64_t num_nodes);
// d_j = max(1, d / 2^j).
std::vector<std::int64_t> level_dims(std::int64_t dim, std::int32_t levels);
// c = ceil(sqrt(n / m0)) in exact integer arithmetic.
std::int64_t default_bucket_factor(std::int64_t num_nodes, std::int64_t m0);

// With empty `level_sizes`, uses the nominal sizes m_j = min(k^(j+1), n) that
// a hierarchy reaches when every part can be split.
SchemeShape resolve_shape(const SchemeConfig& config, std::int64_t num_nodes,
                          std::span<const PartId> level_sizes = {});

// Everything a scheme needs besides its config.
struct SchemeContext {
  NodeId num_nodes = 0;
  std::uint64_t seed = 0;
  std::shared_ptr<const PartitionHierarchy> hierarchy;
  // Key hashed for node i; empty means i itself.
  std::vector<std::int64_t> hash_keys;
};

// Forward / backward / parameter contract shared by every method.
class EmbeddingScheme {
 public:
  virtual ~EmbeddingScheme() = default;

  SchemeKind kind() const { return kind_; }
  std::int64_t dim() const { return dim_; }

  // Row r of the result is the embedding of ids[r].
  virtual Matrix forward(std::span<const NodeId> ids) const = 0;
  // Accumulates d(loss)/d(parameters) given d(loss)/d(forward(ids)).
  virtual void backward(std::span<const NodeId> ids,
                        const Matrix& upstream) = 0;
  virtual std::vector<Parameter*> parameters() = 0;
  virtual std::vector<UniversalHash> hash_functions() const { return {}; }

  std::vector<const Parameter*> parameters() const;
  Parameter& parameter(std::string_view name);
  std::int64_t param_count() const;
  void zero_grad();

 protected:
  EmbeddingScheme(SchemeKind kind, std::int64_t dim) : kind_(kind), dim_(dim) {}
  void check_ids(std::span<const NodeId> ids, std::int64_t limit) const;
  void check_upstream(std::span<const NodeId> ids, const Matrix& g) const;

 private:
  SchemeKind kind_;
  std::int64_t dim_;
};

// One row per node.
class FullEmbedding final : public EmbeddingScheme {
 public:
  FullEmbedding(NodeId num_nodes, std::int64_t dim, std::uint64_t seed);

  Matrix forward(std::span<const NodeId> ids) const override;
  void backward(std::span<const NodeId> ids, const Matrix& upstream) override;
  std::vector<Parameter*> parameters() override { return {&table_}; }

 private:
  NodeId num_nodes_;
  Parameter table_;
};

// Shared B x d table addressed by h hash functions. Without importance
// weights the component rows are summed (HashTrick for h = 1, Bloom for
// h = 2); with them each row is scaled by the node's weight (HashEmb).
class HashEmbedding final : public EmbeddingScheme {
 public:
  HashEmbedding(SchemeKind kind, NodeId num_nodes, std::int64_t dim,
                std::vector<UniversalHash> hashes, bool weighted,
                std::uint64_t seed, std::vector<std::int64_t> hash_keys = {});

  Matrix forward(std::span<const NodeId> ids) const override;
  void backward(std::span<const NodeId> ids, const Matrix& upstream) override;
  std::vector<Parameter*> parameters() override;
  std::vector<UniversalHash> hash_functions() const override { return hashes_; }

  std::uint64_t bucket(NodeId id, std::size_t fn) const;

 private:
  NodeId num_nodes_;
  std::vector<UniversalHash> hashes_;
  std::vector<std::int64_t> keys_;
  bool weighted_;
  Parameter table_;
  Parameter importance_;
};

// Dense hash encoding followed by a ReLU MLP; no per-node storage.
class DheEmbedding final : public EmbeddingScheme {
 public:
  DheEmbedding(NodeId num_nodes, std::int64_t dim, const DheSettings& settings,
               std::vector<UniversalHash> hashes, std::uint64_t seed,
               std::vector<std::int64_t> hash_keys = {});

  // Component j is 2 * H_j(id) / (B - 1) - 1.
  std::vector<double> encode(NodeId id) const;
  Matrix forward(std::span<const NodeId> ids) const override;
  void backward(std::span<const NodeId> ids, const Matrix& upstream) override;
  std::vector<Parameter*> parameters() override;
  std::vector<UniversalHash> hash_functions() const override { return hashes_; }

 private:
  Matrix encode_batch(std::span<const NodeId> ids) const;
  // Pre-activations of every layer; the last entry is the output.
  std::vector<Matrix> run(const Matrix& input) const;

  NodeId num_nodes_;
  DheSettings settings_;
  std::vector<UniversalHash> hashes_;
  std::vector<std::int64_t> keys_;
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;
};

// Sum over levels of the node's partition embedding; level j has width d_j
// and is zero-extended to d before summing.
class PositionEmbedding final : public EmbeddingScheme {
 public:
  PositionEmbedding(std::shared_ptr<const PartitionHierarchy> hierarchy,
                    std::int64_t dim, std::uint64_t seed);

  Matrix forward(std::span<const NodeId> ids) const override;
  void backward(std::span<const NodeId> ids, const Matrix& upstream) override;
  std::vector<Parameter*> parameters() override;

  const PartitionHierarchy& hierarchy() const { return *hierarchy_; }

 private:
  std::shared_ptr<const PartitionHierarchy> hierarchy_;
  std::vector<Parameter> tables_;
};

// Importance-weighted hashed rows. Inter shares one b x d table across all
// nodes; Intra gives each level-0 partition its own c rows and reduces the
// same hash functions modulo c.
class NodeSpecificEmbedding final : public EmbeddingScheme {
 public:
  enum class Sharing { kIntra, kInter };

  // Intra: `buckets` is c and the hierarchy is required. Inter: `buckets` is b.
  NodeSpecificEmbedding(Sharing sharing, NodeId num_nodes, std::int64_t dim,
                        std::int64_t buckets, std::vector<UniversalHash> hashes,
                        std::shared_ptr<const PartitionHierarchy> hierarchy,
                        std::uint64_t seed,
                        std::vector<std::int64_t> hash_keys = {});

  Matrix forward(std::span<const NodeId> ids) const override;
  void backward(std::span<const NodeId> ids, const Matrix& upstream) override;
  std::vector<Parameter*> parameters() override;
  std::vector<UniversalHash> hash_functions() const override { return hashes_; }

  std::size_t row_of(NodeId id, std::size_t fn) const;

 private:
  Sharing sharing_;
  NodeId num_nodes_;
  std::int64_t buckets_;
  std::vector<UniversalHash> hashes_;
  std::shared_ptr<const PartitionHierarchy> hierarchy_;
  std::vector<std::int64_t> keys_;
  Parameter table_;
  Parameter importance_;
};

// v = p + lambda * x for a position part p and a node part x.
class CompositeEmbedding final : public EmbeddingScheme {
 public:
  CompositeEmbedding(SchemeKind kind,
                     std::unique_ptr<PositionEmbedding> position,
                     std::unique_ptr<EmbeddingScheme> node_part, double lambda);

  Matrix forward(std::span<const NodeId> ids) const override;
  void backward(std::span<const NodeId> ids, const Matrix& upstream) override;
  std::vector<Parameter*> parameters() override;
  std::vector<UniversalHash> hash_functions() const override {
    return node_part_->hash_functions();
  }

  double lambda() const { return lambda_; }
  const PositionEmbedding& position() const { return *position_; }
  const EmbeddingScheme& node_part() const { return *node_part_; }

 private:
  std::unique_ptr<PositionEmbedding> position_;
  std::unique_ptr<EmbeddingScheme> node_part_;
  double lambda_;
};

// Builds any scheme. Hash functions come from make_hash_family with the
// context seed; position schemes require context.hierarchy.
std::unique_ptr<EmbeddingScheme> make_scheme(const SchemeConfig& config,
                                             const SchemeContext& context);

// Checkpoint: config, context, hash parameters and every table in one JSON
// document. Doubles are written in shortest round-trip form.
nlohmann::json checkpoint_to_json(const SchemeConfig& config,
                                  const SchemeContext& context,
                                  const EmbeddingScheme& scheme);
struct LoadedScheme {
  SchemeConfig config;
  SchemeContext context;
  std::unique_ptr<EmbeddingScheme> scheme;
};
LoadedScheme checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const std::filesystem::path& path,
                     const SchemeConfig& config, const SchemeContext& context,
                     const EmbeddingScheme& scheme);
LoadedScheme load_checkpoint(const std::filesystem::path& path);

}  // namespace poshash

#endif  // POSHASH_EMBEDDING_H_
