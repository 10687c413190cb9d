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

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "poshash/errors.h"
#include "poshash/gcn.h"
#include "poshash/random.h"

namespace poshash {

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw ConfigError("train.lr: must be positive");
  }
  if (epochs < 1) throw ConfigError("train.epochs: must be at least 1");
  if (weight_decay < 0.0) throw ConfigError("train.weight_decay: must be >= 0");
  if (repeats < 1) throw ConfigError("train.repeats: must be at least 1");
  if (hidden < 1) throw ConfigError("train.hidden: must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("train.dropout: must lie in [0, 1)");
  }
}

bool TrainReport::same_result(const TrainReport& o) const {
  return train_loss == o.train_loss && valid_accuracy == o.valid_accuracy &&
         test_accuracy_curve == o.test_accuracy_curve &&
         test_accuracy == o.test_accuracy &&
         best_valid_accuracy == o.best_valid_accuracy &&
         best_epoch == o.best_epoch && epochs == o.epochs &&
         scheme_params == o.scheme_params && model_params == o.model_params &&
         seed == o.seed;
}

TrainReport train(const SparseMatrix& adj, const LabeledDataset& ds,
                  EmbeddingScheme& scheme, GcnModel& model,
                  const TrainConfig& cfg) {
  cfg.validate();
  ds.validate();
  if (scheme.dim() != model.in_dim()) {
    throw ConfigError("scheme width " + std::to_string(scheme.dim()) +
                      " does not match model input width " +
                      std::to_string(model.in_dim()));
  }
  if (static_cast<std::size_t>(adj.rows) != ds.size()) {
    throw DataError("dataset size does not match the graph");
  }
  const auto train_nodes = ds.nodes_in(Split::kTrain);
  const auto valid_nodes = ds.nodes_in(Split::kValid);
  const auto test_nodes = ds.nodes_in(Split::kTest);
  if (train_nodes.empty() || valid_nodes.empty() || test_nodes.empty()) {
    throw DataError("train, valid and test splits must all be non-empty");
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<NodeId> ids(ds.size());
  std::iota(ids.begin(), ids.end(), NodeId{0});

  auto params = scheme.parameters();
  for (auto* p : model.parameters()) params.push_back(p);
  Adam adam(params, AdamOptions{.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));

  TrainReport report;
  report.seed = cfg.seed;
  report.epochs = cfg.epochs;
  report.scheme_params = scheme.param_count();
  report.model_params = model.param_count();
  report.best_valid_accuracy = -1.0;

  GcnCache cache;
  for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    scheme.zero_grad();
    model.zero_grad();
    const Matrix x = scheme.forward(ids);
    Matrix scale;
    if (cfg.dropout > 0.0) {
      scale = Matrix(ds.size(), static_cast<std::size_t>(model.hidden()));
      const double keep = 1.0 / (1.0 - cfg.dropout);
      for (double& s : scale.values()) {
        s = uniform01(dropout_rng) < cfg.dropout ? 0.0 : keep;
      }
    }
    const Matrix logits =
        gcn_forward(adj, x, model, &cache, cfg.dropout > 0.0 ? &scale : nullptr);
    const auto loss = cross_entropy(logits, ds.labels, train_nodes);
    if (!std::isfinite(loss.loss)) {
      throw NumericError("training loss became non-finite at epoch " +
                         std::to_string(epoch));
    }
    const Matrix dx = gcn_backward(adj, model, cache, loss.grad);
    scheme.backward(ids, dx);
    adam.step();

    const Matrix eval_logits = gcn_forward(adj, scheme.forward(ids), model);
    const double valid = evaluate(eval_logits, ds.labels, valid_nodes);
    const double test = evaluate(eval_logits, ds.labels, test_nodes);
    report.train_loss.push_back(loss.loss);
    report.valid_accuracy.push_back(valid);
    report.test_accuracy_curve.push_back(test);
    if (valid > report.best_valid_accuracy) {
      report.best_valid_accuracy = valid;
      report.best_epoch = epoch;
      report.test_accuracy = test;
    }
  }
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

TrainReport train(const Graph& g, const LabeledDataset& ds,
                  EmbeddingScheme& scheme, GcnModel& model,
                  const TrainConfig& cfg) {
  return train(normalized_adjacency(g), ds, scheme, model, cfg);
}

}  // namespace poshash
