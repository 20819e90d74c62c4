// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "transel/data_pipeline.hpp"
#include "transel/scheduler.hpp"
#include "transel/task_registry.hpp"

namespace transel {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  double learning_rate = 2e-5;
  double checkpoint_interval = 0.5;  // in epochs
  std::uint64_t seed = 0;

  void validate() const;
  // floor(epochs / checkpoint_interval)
  std::size_t checkpoint_count() const;
  // Stable text form of everything except the seed; feeds run ids.
  std::string fingerprint() const;
};

using StateToken = std::vector<std::uint8_t>;

// 16 hex digits of FNV-1a over the token bytes.
std::string token_hash(const StateToken& token);

/// What the training loop needs from a model. Multi-task backends keep one
/// output head per task id on top of a shared representation.
///
/// Implementations must make restore(snapshot()) exact and init(seed)
/// deterministic: equal seeds and equal schedules give equal evaluations.
class Trainable {
 public:
  virtual ~Trainable() = default;

  virtual std::string name() const = 0;
  // Resets every parameter. Heads are dropped; add_task creates them.
  virtual void init(std::uint64_t seed, double learning_rate) = 0;
  // Creates the task's head if it does not exist yet. Safe after restore.
  virtual void add_task(const TaskSpec& spec) = 0;
  // One update on a task-homogeneous batch; returns the mean loss.
  virtual double train_step(const std::string& task_id, std::span<const Example* const> batch) = 0;
  // Raw metric value of the task's metric kind.
  virtual double evaluate(const TaskSpec& spec, const SplitData& split) = 0;
  virtual StateToken snapshot() const = 0;
  virtual void restore(const StateToken& token) = 0;
};

using BackendFactory = std::function<std::unique_ptr<Trainable>()>;

struct TaskData {
  TaskSpec spec;
  SplitData train;
  SplitData dev;
  // How `train` was derived from the full split, when it was subsampled.
  std::vector<SubsampleManifest> manifests;
};

using TaskSet = std::vector<const TaskData*>;

TaskSizes train_sizes(const TaskSet& tasks);

/// How a checkpoint's dev metrics collapse into one number to maximize.
/// Scores are normalized metrics, so single-task selection is argmax of the
/// task's own metric and macro-mean selection weighs tasks equally.
struct SelectionRule {
  enum class Kind { kSingleTask, kMacroMean };

  Kind kind = Kind::kSingleTask;
  std::string task_id;

  static SelectionRule single(std::string task_id) { return {Kind::kSingleTask, std::move(task_id)}; }
  static SelectionRule macro_mean() { return {Kind::kMacroMean, {}}; }

  double score(const TaskMetrics& normalized_dev) const;
};

struct CheckpointRecord {
  std::size_t step = 0;
  double epoch_position = 0.0;
  std::map<std::string, double> per_task_dev;  // raw metric values
  double selection_score = 0.0;
  std::string state_hash;
};

struct TrainResult {
  std::vector<CheckpointRecord> history;
  std::size_t best_index = 0;
  StateToken best_state;  // already restored into the backend

  const CheckpointRecord& best() const { return history.at(best_index); }
};

// First index of the maximum selection score.
std::size_t select_best(std::span<const CheckpointRecord> history);

/// Runs floor(epochs / checkpoint_interval) checkpoint intervals. At every
/// checkpoint all tasks are evaluated on dev, the dynamic policy (if any) is
/// refreshed through `source.observe`, and the best state so far is kept. On
/// return the backend holds the best checkpoint's state, not the last one.
TrainResult train(Trainable& backend, ScheduleSource& source, const TaskSet& tasks,
                  const TrainConfig& config, const SelectionRule& rule);

/// 100 x raw metric on the task's dev split.
double evaluate_final(Trainable& backend, const TaskData& task);

}  // namespace transel
