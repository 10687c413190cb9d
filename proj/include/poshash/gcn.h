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

#ifndef POSHASH_GCN_H_
#define POSHASH_GCN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "poshash/embedding.h"
#include "poshash/graph.h"
#include "poshash/matrix.h"

namespace poshash {

// Two-layer GCN: logits = A relu(A X W1 + b1) W2 + b2, biases optional.
class GcnModel {
 public:
  GcnModel(std::int64_t in_dim, std::int64_t hidden, std::int32_t num_classes,
           std::uint64_t seed, bool bias = false);

  std::int64_t in_dim() const { return static_cast<std::int64_t>(w1.value.rows()); }
  std::int64_t hidden() const { return static_cast<std::int64_t>(w1.value.cols()); }
  std::int32_t num_classes() const {
    return static_cast<std::int32_t>(w2.value.cols());
  }
  bool has_bias() const { return bias_; }

  std::vector<Parameter*> parameters();
  std::int64_t param_count() const;
  void zero_grad();

  Parameter w1;
  Parameter w2;
  Parameter b1;
  Parameter b2;

 private:
  bool bias_;
};

// Intermediate activations kept for the backward pass.
struct GcnCache {
  Matrix ax;      // A X
  Matrix z1;      // A X W1 + b1
  Matrix hidden;  // relu(z1), after dropout
  Matrix ah;      // A hidden
  Matrix dropout_scale;  // empty when dropout is off
};

// `dropout_scale` (optional) multiplies the hidden activations elementwise.
Matrix gcn_forward(const SparseMatrix& adj, const Matrix& x,
                   const GcnModel& model, GcnCache* cache = nullptr,
                   const Matrix* dropout_scale = nullptr);

// Accumulates parameter gradients into `model` and returns dLoss/dX. The
// adjacency must be symmetric.
Matrix gcn_backward(const SparseMatrix& adj, GcnModel& model,
                    const GcnCache& cache, const Matrix& dlogits);

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // dLoss/dlogits, zero outside `nodes`
};

// Mean softmax cross-entropy over `nodes`, computed with max subtraction.
LossResult cross_entropy(const Matrix& logits,
                         std::span<const std::int32_t> labels,
                         std::span<const NodeId> nodes);

// Fraction of `nodes` whose argmax (lowest class on ties) equals the label.
double evaluate(const Matrix& logits, std::span<const std::int32_t> labels,
                std::span<const NodeId> nodes);

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// First and second moment estimates of one parameter.
struct AdamState {
  Matrix m;
  Matrix v;
};

// One Adam update at step t >= 1 with bias correction and decoupled weight
// decay (skipped for parameters with decay == false). Sparse parameters only
// update touched rows. Throws NumericError on a non-finite gradient.
void adam_step(Parameter& p, AdamState& state, const AdamOptions& options,
               std::int64_t t);

class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamOptions options);
  void step();
  std::int64_t steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<AdamState> state_;
  AdamOptions options_;
  std::int64_t t_ = 0;
};

struct TrainConfig {
  double lr = 0.01;
  std::int64_t epochs = 200;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  std::int64_t repeats = 5;
  std::int64_t hidden = 64;
  bool bias = false;
  double dropout = 0.0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> valid_accuracy;
  std::vector<double> test_accuracy_curve;
  double test_accuracy = 0.0;  // at the best validation epoch
  double best_valid_accuracy = 0.0;
  std::int64_t best_epoch = 0;
  std::int64_t epochs = 0;
  std::int64_t scheme_params = 0;
  std::int64_t model_params = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;

  // Everything except wall time.
  bool same_result(const TrainReport& other) const;
};

// Full-batch end-to-end training of scheme + model. Reports the test
// accuracy at the epoch with the best validation accuracy (first on ties).
TrainReport train(const SparseMatrix& adj, const LabeledDataset& ds,
                  EmbeddingScheme& scheme, GcnModel& model,
                  const TrainConfig& cfg);
TrainReport train(const Graph& g, const LabeledDataset& ds,
                  EmbeddingScheme& scheme, GcnModel& model,
                  const TrainConfig& cfg);

}  // namespace poshash

#endif  // POSHASH_GCN_H_
