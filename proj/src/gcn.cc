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

#include "poshash/gcn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "poshash/errors.h"
#include "poshash/random.h"

namespace poshash {
namespace {

void glorot(Parameter& p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "gcn-init:" + p.name));
  const double bound = std::sqrt(
      6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  for (double& v : p.value.values()) v = uniform_real(rng, -bound, bound);
}

void add_bias(Matrix& m, const Parameter& b) {
  const auto bias = b.value.row(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias[j];
  }
}

void accumulate_colsum(const Matrix& g, Parameter& b) {
  auto dst = b.grad.row(0);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const auto row = g.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) dst[j] += row[j];
  }
}

void accumulate(const Matrix& src, Matrix& dst) {
  auto d = dst.values();
  const auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

GcnModel::GcnModel(std::int64_t in_dim, std::int64_t hidden,
                   std::int32_t num_classes, std::uint64_t seed, bool bias)
    : w1("gcn.W1", static_cast<std::size_t>(in_dim),
         static_cast<std::size_t>(hidden), false),
      w2("gcn.W2", static_cast<std::size_t>(hidden),
         static_cast<std::size_t>(num_classes), false),
      b1("gcn.b1", 1, bias ? static_cast<std::size_t>(hidden) : 0, false),
      b2("gcn.b2", 1, bias ? static_cast<std::size_t>(num_classes) : 0, false),
      bias_(bias) {
  if (in_dim < 1 || hidden < 1 || num_classes < 1) {
    throw ConfigError("GCN dimensions must be positive");
  }
  glorot(w1, seed);
  glorot(w2, seed);
}

std::vector<Parameter*> GcnModel::parameters() {
  if (bias_) return {&w1, &b1, &w2, &b2};
  return {&w1, &w2};
}

std::int64_t GcnModel::param_count() const {
  auto count = static_cast<std::int64_t>(w1.value.size() + w2.value.size());
  if (bias_) count += static_cast<std::int64_t>(b1.value.size() + b2.value.size());
  return count;
}

void GcnModel::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

Matrix gcn_forward(const SparseMatrix& adj, const Matrix& x,
                   const GcnModel& model, GcnCache* cache,
                   const Matrix* dropout_scale) {
  if (static_cast<std::int64_t>(x.cols()) != model.in_dim()) {
    throw NumericError("GCN input width " + std::to_string(x.cols()) +
                       " does not match model width " +
                       std::to_string(model.in_dim()));
  }
  if (static_cast<std::size_t>(adj.rows) != x.rows()) {
    throw NumericError("GCN input has " + std::to_string(x.rows()) +
                       " rows for a graph with " + std::to_string(adj.rows) +
                       " nodes");
  }
  if (!x.all_finite()) throw NumericError("GCN input contains non-finite values");

  Matrix ax = spmm(adj, x);
  Matrix z1 = matmul(ax, model.w1.value);
  if (model.has_bias()) add_bias(z1, model.b1);
  Matrix hidden = z1;
  for (double& v : hidden.values()) v = std::max(v, 0.0);
  if (dropout_scale != nullptr) {
    const auto s = dropout_scale->values();
    auto h = hidden.values();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= s[i];
  }
  Matrix ah = spmm(adj, hidden);
  Matrix logits = matmul(ah, model.w2.value);
  if (model.has_bias()) add_bias(logits, model.b2);
  if (cache != nullptr) {
    cache->ax = std::move(ax);
    cache->z1 = std::move(z1);
    cache->hidden = std::move(hidden);
    cache->ah = std::move(ah);
    cache->dropout_scale =
        dropout_scale != nullptr ? *dropout_scale : Matrix();
  }
  return logits;
}

Matrix gcn_backward(const SparseMatrix& adj, GcnModel& model,
                    const GcnCache& cache, const Matrix& dlogits) {
  accumulate(matmul_tn(cache.ah, dlogits), model.w2.grad);
  if (model.has_bias()) accumulate_colsum(dlogits, model.b2);
  const Matrix dah = matmul_nt(dlogits, model.w2.value);
  Matrix dz1 = spmm(adj, dah);
  {
    auto g = dz1.values();
    const auto z = cache.z1.values();
    const bool dropped = cache.dropout_scale.size() != 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (z[i] <= 0.0) {
        g[i] = 0.0;
      } else if (dropped) {
        g[i] *= cache.dropout_scale.values()[i];
      }
    }
  }
  accumulate(matmul_tn(cache.ax, dz1), model.w1.grad);
  if (model.has_bias()) accumulate_colsum(dz1, model.b1);
  const Matrix dax = matmul_nt(dz1, model.w1.value);
  return spmm(adj, dax);
}

LossResult cross_entropy(const Matrix& logits,
                         std::span<const std::int32_t> labels,
                         std::span<const NodeId> nodes) {
  if (nodes.empty()) throw DataError("cross_entropy: empty node mask");
  if (labels.size() != logits.rows()) {
    throw NumericError("cross_entropy: label count does not match logits");
  }
  LossResult out;
  out.grad = Matrix(logits.rows(), logits.cols());
  const double scale = 1.0 / static_cast<double>(nodes.size());
  std::vector<double> prob(logits.cols());
  for (NodeId i : nodes) {
    const auto row = logits.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      prob[c] = std::exp(row[c] - mx);
      sum += prob[c];
    }
    const auto label = static_cast<std::size_t>(labels[i]);
    out.loss -= (row[label] - mx - std::log(sum)) * scale;
    auto g = out.grad.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      g[c] = (prob[c] / sum - (c == label ? 1.0 : 0.0)) * scale;
    }
  }
  return out;
}

double evaluate(const Matrix& logits, std::span<const std::int32_t> labels,
                std::span<const NodeId> nodes) {
  if (nodes.empty()) throw DataError("evaluate: empty node mask");
  std::int64_t correct = 0;
  for (NodeId i : nodes) {
    const auto row = logits.row(i);
    const auto pred = std::max_element(row.begin(), row.end()) - row.begin();
    if (pred == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

void adam_step(Parameter& p, AdamState& state, const AdamOptions& options,
               std::int64_t t) {
  if (t < 1) throw NumericError("adam_step: step count must be >= 1");
  if (!p.grad.all_finite()) {
    throw NumericError("non-finite gradient in parameter '" + p.name + "'");
  }
  if (state.m.size() != p.value.size()) {
    state.m = Matrix(p.value.rows(), p.value.cols());
    state.v = Matrix(p.value.rows(), p.value.cols());
  }
  const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(t));
  const double decay = p.decay ? options.lr * options.weight_decay : 0.0;
  const std::size_t cols = p.value.cols();
  for (std::size_t r = 0; r < p.value.rows(); ++r) {
    if (p.sparse && !p.touched[r]) continue;
    auto w = p.value.row(r);
    const auto g = p.grad.row(r);
    auto m = state.m.row(r);
    auto v = state.v.row(r);
    for (std::size_t j = 0; j < cols; ++j) {
      m[j] = options.beta1 * m[j] + (1.0 - options.beta1) * g[j];
      v[j] = options.beta2 * v[j] + (1.0 - options.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      w[j] -= decay * w[j];
      w[j] -= options.lr * m_hat / (std::sqrt(v_hat) + options.eps);
    }
  }
}

Adam::Adam(std::vector<Parameter*> params, AdamOptions options)
    : params_(std::move(params)),
      state_(params_.size()),
      options_(options) {}

void Adam::step() {
  ++t_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adam_step(*params_[i], state_[i], options_, t_);
  }
}

}  // namespace poshash
