// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "transel/training_engine.hpp"

namespace transel {

struct TinyBackendOptions {
  unsigned hash_bits = 14;   // 2^hash_bits feature buckets
  std::size_t hidden = 16;   // width of the shared layer
  double init_scale = 0.1;
};

/// Desk-scale multi-task model: hashed bag-of-token features, one shared
/// tanh layer, and a softmax (or scalar, for regression) head per task,
/// trained by minibatch SGD.
///
/// Tokens of the form "name:value" contribute `value` at bucket hash(name);
/// any other token contributes 1. Tokens from text_b are namespaced so the
/// two segments do not share buckets.
class TinyBackend final : public Trainable {
 public:
  explicit TinyBackend(TinyBackendOptions options = {});

  std::string name() const override { return "tiny"; }
  void init(std::uint64_t seed, double learning_rate) override;
  void add_task(const TaskSpec& spec) override;
  double train_step(const std::string& task_id, std::span<const Example* const> batch) override;
  double evaluate(const TaskSpec& spec, const SplitData& split) override;
  StateToken snapshot() const override;
  void restore(const StateToken& token) override;

  using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;
  SparseFeatures featurize(const Example& example) const;

  // Predicted class index (or value, for regression).
  double predict(const std::string& task_id, const Example& example) const;

 private:
  struct Head {
    std::size_t outputs = 0;
    bool regression = false;
    std::vector<double> weights;  // outputs x hidden, row-major
    std::vector<double> bias;     // outputs
  };

  void hidden_layer(const SparseFeatures& features, std::vector<double>& h) const;
  void head_outputs(const Head& head, const std::vector<double>& h, std::vector<double>& out) const;

  TinyBackendOptions options_;
  std::uint64_t seed_ = 0;
  double learning_rate_ = 0.0;
  std::vector<double> embedding_;    // buckets x hidden
  std::vector<double> hidden_bias_;  // hidden
  std::map<std::string, Head> heads_;
};

BackendFactory tiny_backend_factory(TinyBackendOptions options = {});

}  // namespace transel
