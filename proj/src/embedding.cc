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

#include "poshash/embedding.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "poshash/errors.h"
#include "poshash/random.h"

namespace poshash {
namespace {

void init_uniform(Parameter& p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "init:" + p.name));
  const double bound = 1.0 / std::sqrt(static_cast<double>(p.value.cols()));
  for (double& v : p.value.values()) v = uniform_real(rng, -bound, bound);
}

Parameter make_importance(NodeId n, std::size_t h) {
  Parameter y("Y", static_cast<std::size_t>(n), h, /*sparse=*/true,
              /*decay=*/false);
  y.value.fill(1.0 / static_cast<double>(h));
  return y;
}

std::uint64_t key_of(std::span<const std::int64_t> keys, NodeId id) {
  return keys.empty() ? static_cast<std::uint64_t>(id)
                      : static_cast<std::uint64_t>(keys[id]);
}

void check_keys(std::span<const std::int64_t> keys, NodeId n) {
  if (keys.empty()) return;
  if (keys.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("hash_keys must have one entry per node");
  }
  for (auto k : keys) {
    if (k < 0 || static_cast<std::uint64_t>(k) >= UniversalHash::kPrime) {
      throw ConfigError("hash key outside [0, 2^61 - 1)");
    }
  }
}

void axpy(double s, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

Parameter::Parameter(std::string name, std::size_t rows, std::size_t cols,
                     bool sparse, bool decay)
    : name(std::move(name)),
      value(rows, cols),
      grad(rows, cols),
      sparse(sparse),
      decay(decay),
      touched(sparse ? rows : 0, 0) {}

void Parameter::zero_grad() {
  grad.fill(0.0);
  std::fill(touched.begin(), touched.end(), std::uint8_t{0});
}

std::vector<const Parameter*> EmbeddingScheme::parameters() const {
  auto params = const_cast<EmbeddingScheme*>(this)->parameters();
  return {params.begin(), params.end()};
}

Parameter& EmbeddingScheme::parameter(std::string_view name) {
  for (auto* p : parameters()) {
    if (p->name == name) return *p;
  }
  throw ConfigError("scheme has no parameter '" + std::string(name) + "'");
}

std::int64_t EmbeddingScheme::param_count() const {
  std::int64_t total = 0;
  for (const auto* p : parameters()) {
    total += static_cast<std::int64_t>(p->value.size());
  }
  return total;
}

void EmbeddingScheme::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

void EmbeddingScheme::check_ids(std::span<const NodeId> ids,
                                std::int64_t limit) const {
  for (auto id : ids) {
    if (id < 0 || id >= limit) {
      throw DataError("node id " + std::to_string(id) + " out of range [0, " +
                      std::to_string(limit) + ")");
    }
  }
}

void EmbeddingScheme::check_upstream(std::span<const NodeId> ids,
                                     const Matrix& g) const {
  if (g.rows() != ids.size() || static_cast<std::int64_t>(g.cols()) != dim_) {
    throw NumericError("upstream gradient shape does not match embedding output");
  }
}

// --- FullEmbedding ---------------------------------------------------------

FullEmbedding::FullEmbedding(NodeId num_nodes, std::int64_t dim,
                             std::uint64_t seed)
    : EmbeddingScheme(SchemeKind::kFullEmb, dim),
      num_nodes_(num_nodes),
      table_("W", static_cast<std::size_t>(num_nodes),
             static_cast<std::size_t>(dim), true) {
  init_uniform(table_, seed);
}

Matrix FullEmbedding::forward(std::span<const NodeId> ids) const {
  check_ids(ids, num_nodes_);
  Matrix out(ids.size(), static_cast<std::size_t>(dim()));
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto src = table_.value.row(ids[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void FullEmbedding::backward(std::span<const NodeId> ids,
                             const Matrix& upstream) {
  check_ids(ids, num_nodes_);
  check_upstream(ids, upstream);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    axpy(1.0, upstream.row(r), table_.grad.row(ids[r]));
    table_.mark(ids[r]);
  }
}

// --- HashEmbedding ---------------------------------------------------------

HashEmbedding::HashEmbedding(SchemeKind kind, NodeId num_nodes,
                             std::int64_t dim,
                             std::vector<UniversalHash> hashes, bool weighted,
                             std::uint64_t seed,
                             std::vector<std::int64_t> hash_keys)
    : EmbeddingScheme(kind, dim),
      num_nodes_(num_nodes),
      hashes_(std::move(hashes)),
      keys_(std::move(hash_keys)),
      weighted_(weighted) {
  if (hashes_.empty()) throw ConfigError("hash embedding needs h >= 1");
  const auto buckets = hashes_.front().m;
  for (const auto& f : hashes_) {
    if (f.m != buckets) throw ConfigError("hash functions differ in range");
  }
  check_keys(keys_, num_nodes_);
  table_ = Parameter("W", buckets, static_cast<std::size_t>(dim), true);
  init_uniform(table_, seed);
  if (weighted_) importance_ = make_importance(num_nodes_, hashes_.size());
}

std::uint64_t HashEmbedding::bucket(NodeId id, std::size_t fn) const {
  return hashes_[fn](key_of(keys_, id));
}

std::vector<Parameter*> HashEmbedding::parameters() {
  if (weighted_) return {&table_, &importance_};
  return {&table_};
}

Matrix HashEmbedding::forward(std::span<const NodeId> ids) const {
  check_ids(ids, num_nodes_);
  Matrix out(ids.size(), static_cast<std::size_t>(dim()));
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto dst = out.row(r);
    for (std::size_t j = 0; j < hashes_.size(); ++j) {
      const double w = weighted_ ? importance_.value(ids[r], j) : 1.0;
      axpy(w, table_.value.row(bucket(ids[r], j)), dst);
    }
  }
  return out;
}

void HashEmbedding::backward(std::span<const NodeId> ids,
                             const Matrix& upstream) {
  check_ids(ids, num_nodes_);
  check_upstream(ids, upstream);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto g = upstream.row(r);
    for (std::size_t j = 0; j < hashes_.size(); ++j) {
      const auto row = bucket(ids[r], j);
      if (weighted_) {
        importance_.grad(ids[r], j) += dot(g, table_.value.row(row));
        importance_.mark(ids[r]);
        axpy(importance_.value(ids[r], j), g, table_.grad.row(row));
      } else {
        axpy(1.0, g, table_.grad.row(row));
      }
      table_.mark(row);
    }
  }
}

// --- DheEmbedding ----------------------------------------------------------

DheEmbedding::DheEmbedding(NodeId num_nodes, std::int64_t dim,
                           const DheSettings& settings,
                           std::vector<UniversalHash> hashes,
                           std::uint64_t seed,
                           std::vector<std::int64_t> hash_keys)
    : EmbeddingScheme(SchemeKind::kDhe, dim),
      num_nodes_(num_nodes),
      settings_(settings),
      hashes_(std::move(hashes)),
      keys_(std::move(hash_keys)) {
  if (static_cast<std::int64_t>(hashes_.size()) != settings_.encoding_width) {
    throw ConfigError("DHE needs one hash function per encoding component");
  }
  if (settings_.buckets < 2) throw ConfigError("DHE buckets must be >= 2");
  check_keys(keys_, num_nodes_);
  std::vector<std::int64_t> widths{settings_.encoding_width};
  for (std::int32_t l = 0; l < settings_.hidden_layers; ++l) {
    widths.push_back(settings_.hidden_width);
  }
  widths.push_back(dim);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(widths[l]);
    const auto fan_out = static_cast<std::size_t>(widths[l + 1]);
    Parameter w("dhe.W" + std::to_string(l), fan_in, fan_out, false);
    Parameter b("dhe.b" + std::to_string(l), 1, fan_out, false);
    // Linear-layer convention: both bounded by 1/sqrt(fan_in).
    Rng rng(derive_seed(seed, "init:" + w.name));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : w.value.values()) v = uniform_real(rng, -bound, bound);
    for (double& v : b.value.values()) v = uniform_real(rng, -bound, bound);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

std::vector<double> DheEmbedding::encode(NodeId id) const {
  std::vector<double> out(hashes_.size());
  const double scale = 2.0 / static_cast<double>(settings_.buckets - 1);
  const auto key = key_of(keys_, id);
  for (std::size_t j = 0; j < hashes_.size(); ++j) {
    out[j] = scale * static_cast<double>(hashes_[j](key)) - 1.0;
  }
  return out;
}

Matrix DheEmbedding::encode_batch(std::span<const NodeId> ids) const {
  check_ids(ids, num_nodes_);
  Matrix out(ids.size(), hashes_.size());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto e = encode(ids[r]);
    std::copy(e.begin(), e.end(), out.row(r).begin());
  }
  return out;
}

std::vector<Matrix> DheEmbedding::run(const Matrix& input) const {
  std::vector<Matrix> pre;
  const Matrix* act = &input;
  Matrix relu_out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = matmul(*act, weights_[l].value);
    for (std::size_t r = 0; r < z.rows(); ++r) {
      axpy(1.0, biases_[l].value.row(0), z.row(r));
    }
    pre.push_back(std::move(z));
    if (l + 1 < weights_.size()) {
      relu_out = pre.back();
      for (double& v : relu_out.values()) v = std::max(v, 0.0);
      act = &relu_out;
    }
  }
  return pre;
}

Matrix DheEmbedding::forward(std::span<const NodeId> ids) const {
  return std::move(run(encode_batch(ids)).back());
}

void DheEmbedding::backward(std::span<const NodeId> ids,
                            const Matrix& upstream) {
  check_upstream(ids, upstream);
  const Matrix input = encode_batch(ids);
  const auto pre = run(input);
  Matrix g = upstream;
  for (std::size_t l = weights_.size(); l-- > 0;) {
    Matrix act;
    if (l == 0) {
      act = input;
    } else {
      act = pre[l - 1];
      for (double& v : act.values()) v = std::max(v, 0.0);
    }
    const Matrix dw = matmul_tn(act, g);
    axpy(1.0, dw.values(), weights_[l].grad.values());
    for (std::size_t r = 0; r < g.rows(); ++r) {
      axpy(1.0, g.row(r), biases_[l].grad.row(0));
    }
    if (l == 0) break;
    Matrix prev = matmul_nt(g, weights_[l].value);
    const auto z = pre[l - 1].values();
    auto pv = prev.values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      if (z[i] <= 0.0) pv[i] = 0.0;
    }
    g = std::move(prev);
  }
}

std::vector<Parameter*> DheEmbedding::parameters() {
  std::vector<Parameter*> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

// --- PositionEmbedding -----------------------------------------------------

PositionEmbedding::PositionEmbedding(
    std::shared_ptr<const PartitionHierarchy> hierarchy, std::int64_t dim,
    std::uint64_t seed)
    : EmbeddingScheme(SchemeKind::kPosEmb, dim),
      hierarchy_(std::move(hierarchy)) {
  if (!hierarchy_) throw ConfigError("position embedding needs a hierarchy");
  const auto dims = level_dims(dim, hierarchy_->num_levels());
  for (std::int32_t j = 0; j < hierarchy_->num_levels(); ++j) {
    Parameter p("P" + std::to_string(j),
                static_cast<std::size_t>(hierarchy_->level_size(j)),
                static_cast<std::size_t>(dims[j]), true);
    init_uniform(p, seed);
    tables_.push_back(std::move(p));
  }
}

Matrix PositionEmbedding::forward(std::span<const NodeId> ids) const {
  check_ids(ids, hierarchy_->num_nodes());
  Matrix out(ids.size(), static_cast<std::size_t>(dim()));
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto dst = out.row(r);
    for (std::int32_t j = 0; j < hierarchy_->num_levels(); ++j) {
      const auto src = tables_[j].value.row(hierarchy_->part(ids[r], j));
      axpy(1.0, src, dst.first(src.size()));
    }
  }
  return out;
}

void PositionEmbedding::backward(std::span<const NodeId> ids,
                                 const Matrix& upstream) {
  check_ids(ids, hierarchy_->num_nodes());
  check_upstream(ids, upstream);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto g = upstream.row(r);
    for (std::int32_t j = 0; j < hierarchy_->num_levels(); ++j) {
      auto& table = tables_[j];
      const auto row = static_cast<std::size_t>(hierarchy_->part(ids[r], j));
      axpy(1.0, g.first(table.value.cols()), table.grad.row(row));
      table.mark(row);
    }
  }
}

std::vector<Parameter*> PositionEmbedding::parameters() {
  std::vector<Parameter*> out;
  for (auto& t : tables_) out.push_back(&t);
  return out;
}

// --- NodeSpecificEmbedding -------------------------------------------------

NodeSpecificEmbedding::NodeSpecificEmbedding(
    Sharing sharing, NodeId num_nodes, std::int64_t dim, std::int64_t buckets,
    std::vector<UniversalHash> hashes,
    std::shared_ptr<const PartitionHierarchy> hierarchy, std::uint64_t seed,
    std::vector<std::int64_t> hash_keys)
    : EmbeddingScheme(sharing == Sharing::kIntra
                          ? SchemeKind::kPosHashEmbIntra
                          : SchemeKind::kPosHashEmbInter,
                      dim),
      sharing_(sharing),
      num_nodes_(num_nodes),
      buckets_(buckets),
      hashes_(std::move(hashes)),
      hierarchy_(std::move(hierarchy)),
      keys_(std::move(hash_keys)) {
  if (buckets_ < 1) throw ConfigError("node-specific bucket count must be >= 1");
  if (hashes_.empty()) throw ConfigError("node-specific component needs h >= 1");
  check_keys(keys_, num_nodes_);
  std::int64_t rows = buckets_;
  if (sharing_ == Sharing::kIntra) {
    if (!hierarchy_) throw ConfigError("intra sharing needs a hierarchy");
    rows = buckets_ * hierarchy_->level_size(0);
  }
  table_ = Parameter("X", static_cast<std::size_t>(rows),
                     static_cast<std::size_t>(dim), true);
  init_uniform(table_, seed);
  importance_ = make_importance(num_nodes_, hashes_.size());
}

std::size_t NodeSpecificEmbedding::row_of(NodeId id, std::size_t fn) const {
  const auto local = hashes_[fn](key_of(keys_, id)) %
                     static_cast<std::uint64_t>(buckets_);
  if (sharing_ == Sharing::kInter) return static_cast<std::size_t>(local);
  return static_cast<std::size_t>(hierarchy_->part(id, 0)) *
             static_cast<std::size_t>(buckets_) +
         static_cast<std::size_t>(local);
}

Matrix NodeSpecificEmbedding::forward(std::span<const NodeId> ids) const {
  check_ids(ids, num_nodes_);
  Matrix out(ids.size(), static_cast<std::size_t>(dim()));
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto dst = out.row(r);
    for (std::size_t j = 0; j < hashes_.size(); ++j) {
      axpy(importance_.value(ids[r], j), table_.value.row(row_of(ids[r], j)),
           dst);
    }
  }
  return out;
}

void NodeSpecificEmbedding::backward(std::span<const NodeId> ids,
                                     const Matrix& upstream) {
  check_ids(ids, num_nodes_);
  check_upstream(ids, upstream);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto g = upstream.row(r);
    for (std::size_t j = 0; j < hashes_.size(); ++j) {
      const auto row = row_of(ids[r], j);
      importance_.grad(ids[r], j) += dot(g, table_.value.row(row));
      axpy(importance_.value(ids[r], j), g, table_.grad.row(row));
      table_.mark(row);
    }
    importance_.mark(ids[r]);
  }
}

std::vector<Parameter*> NodeSpecificEmbedding::parameters() {
  return {&table_, &importance_};
}

// --- CompositeEmbedding ----------------------------------------------------

CompositeEmbedding::CompositeEmbedding(
    SchemeKind kind, std::unique_ptr<PositionEmbedding> position,
    std::unique_ptr<EmbeddingScheme> node_part, double lambda)
    : EmbeddingScheme(kind, position ? position->dim() : 0),
      position_(std::move(position)),
      node_part_(std::move(node_part)),
      lambda_(lambda) {
  if (!position_ || !node_part_) {
    throw ConfigError("composite embedding needs both components");
  }
  if (position_->dim() != node_part_->dim()) {
    throw ConfigError("position and node-specific widths differ");
  }
}

Matrix CompositeEmbedding::forward(std::span<const NodeId> ids) const {
  Matrix out = position_->forward(ids);
  if (lambda_ != 0.0) {
    const Matrix x = node_part_->forward(ids);
    axpy(lambda_, x.values(), out.values());
  }
  return out;
}

void CompositeEmbedding::backward(std::span<const NodeId> ids,
                                  const Matrix& upstream) {
  position_->backward(ids, upstream);
  Matrix scaled = upstream;
  for (double& v : scaled.values()) v *= lambda_;
  node_part_->backward(ids, scaled);
}

std::vector<Parameter*> CompositeEmbedding::parameters() {
  auto out = position_->parameters();
  for (auto* p : node_part_->parameters()) out.push_back(p);
  return out;
}

// --- factory ---------------------------------------------------------------

std::unique_ptr<EmbeddingScheme> make_scheme(const SchemeConfig& config,
                                             const SchemeContext& context) {
  config.validate();
  const NodeId n = context.num_nodes;
  if (n < 1) throw ConfigError("scheme needs at least one node");
  if (needs_hierarchy(config.kind)) {
    if (!context.hierarchy) {
      throw ConfigError(std::string(to_string(config.kind)) +
                        " needs a partition hierarchy");
    }
    if (context.hierarchy->num_nodes() != n) {
      throw ConfigError("hierarchy node count does not match the graph");
    }
  }
  const std::span<const PartId> sizes =
      context.hierarchy ? context.hierarchy->level_sizes()
                        : std::span<const PartId>{};
  const auto shape = resolve_shape(config, n, sizes);
  const auto d = config.dim;
  const auto seed = context.seed;
  auto node_hashes = [&](std::int64_t count, std::int64_t range) {
    return make_hash_family(seed, kNodeBucketHashTag,
                            static_cast<std::size_t>(count),
                            static_cast<std::uint64_t>(range));
  };
  auto position = [&] {
    return std::make_unique<PositionEmbedding>(context.hierarchy, d, seed);
  };

  switch (config.kind) {
    case SchemeKind::kFullEmb:
      return std::make_unique<FullEmbedding>(n, d, seed);
    case SchemeKind::kHashTrick:
    case SchemeKind::kRandomPart:
    case SchemeKind::kBloom:
    case SchemeKind::kHashEmb:
      return std::make_unique<HashEmbedding>(
          config.kind, n, d, node_hashes(shape.num_hashes, shape.buckets),
          config.kind == SchemeKind::kHashEmb, seed, context.hash_keys);
    case SchemeKind::kDhe:
      return std::make_unique<DheEmbedding>(
          n, d, config.dhe,
          make_hash_family(seed, kDenseEncodingHashTag,
                           static_cast<std::size_t>(config.dhe.encoding_width),
                           static_cast<std::uint64_t>(config.dhe.buckets)),
          seed, context.hash_keys);
    case SchemeKind::kPosEmb:
      return position();
    case SchemeKind::kPosFullEmb:
      return std::make_unique<CompositeEmbedding>(
          config.kind, position(), std::make_unique<FullEmbedding>(n, d, seed),
          config.lambda);
    case SchemeKind::kPosHashEmbIntra:
    case SchemeKind::kPosHashEmbInter: {
      const bool intra = config.kind == SchemeKind::kPosHashEmbIntra;
      const auto buckets = intra ? shape.c : shape.b;
      auto node = std::make_unique<NodeSpecificEmbedding>(
          intra ? NodeSpecificEmbedding::Sharing::kIntra
                : NodeSpecificEmbedding::Sharing::kInter,
          n, d, buckets, node_hashes(shape.num_hashes, buckets),
          context.hierarchy, seed, context.hash_keys);
      return std::make_unique<CompositeEmbedding>(config.kind, position(),
                                                  std::move(node),
                                                  config.lambda);
    }
  }
  throw ConfigError("unhandled scheme kind");
}

}  // namespace poshash
