// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/training_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "transel/error.hpp"
#include "transel/rng.hpp"

namespace transel {

void TrainConfig::validate() const {
  require(epochs >= 1, ErrorCode::kValidation, "epochs must be >= 1");
  require(batch_size >= 1, ErrorCode::kValidation, "batch_size must be >= 1");
  require(checkpoint_interval > 0.0 && checkpoint_interval <= static_cast<double>(epochs),
          ErrorCode::kValidation, "checkpoint_interval must lie in (0, epochs]");
}

std::size_t TrainConfig::checkpoint_count() const {
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(epochs) / checkpoint_interval + 1e-9));
}

std::string TrainConfig::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "epochs=" << epochs << ";batch=" << batch_size << ";lr=" << learning_rate
     << ";ckpt=" << checkpoint_interval;
  return os.str();
}

std::string token_hash(const StateToken& token) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(token)));
  return buf;
}

TaskSizes train_sizes(const TaskSet& tasks) {
  TaskSizes sizes;
  for (const auto* t : tasks) sizes[t->spec.task_id] = t->train.size();
  return sizes;
}

double SelectionRule::score(const TaskMetrics& normalized_dev) const {
  if (kind == Kind::kSingleTask) {
    auto it = normalized_dev.find(task_id);
    require(it != normalized_dev.end(), ErrorCode::kValidation,
            "selection task '" + task_id + "' was not evaluated");
    return it->second;
  }
  require(!normalized_dev.empty(), ErrorCode::kValidation, "no dev metrics to select on");
  double sum = 0.0;
  for (const auto& [_, v] : normalized_dev) sum += v;
  return sum / static_cast<double>(normalized_dev.size());
}

std::size_t select_best(std::span<const CheckpointRecord> history) {
  require(!history.empty(), ErrorCode::kValidation, "empty checkpoint history");
  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].selection_score > history[best].selection_score) best = i;
  }
  return best;
}

TrainResult train(Trainable& backend, ScheduleSource& source, const TaskSet& tasks,
                  const TrainConfig& config, const SelectionRule& rule) {
  config.validate();
  require(!tasks.empty(), ErrorCode::kValidation, "no tasks to train on");
  std::map<std::string, const TaskData*> by_id;
  for (const auto* t : tasks) {
    require(t->dev.size() > 0, ErrorCode::kValidation, "task '" + t->spec.task_id + "' has no dev split");
    by_id[t->spec.task_id] = t;
  }
  const std::size_t steps_per_epoch = source.steps_per_epoch();
  require(steps_per_epoch > 0, ErrorCode::kValidation, "empty schedule");

  TrainResult result;
  const std::size_t checkpoints = config.checkpoint_count();
  std::size_t step = 0;
  std::vector<const Example*> batch;

  for (std::size_t k = 1; k <= checkpoints; ++k) {
    const double position = static_cast<double>(k) * config.checkpoint_interval;
    const auto boundary = static_cast<std::size_t>(
        std::llround(position * static_cast<double>(steps_per_epoch)));
    while (step < boundary) {
      const std::size_t epoch = step / steps_per_epoch;
      const std::size_t left_in_epoch = (epoch + 1) * steps_per_epoch - step;
      const std::size_t n = std::min(boundary - step, left_in_epoch);
      const BatchSchedule schedule = source.segment(epoch, n);
      require(!schedule.steps.empty(), ErrorCode::kValidation, "empty schedule");
      for (const auto& s : schedule.steps) {
        auto it = by_id.find(s.task_id);
        require(it != by_id.end(), ErrorCode::kValidation,
                "schedule names unknown task '" + s.task_id + "'");
        batch.clear();
        for (auto idx : s.indices) batch.push_back(&it->second->train.examples.at(idx));
        try {
          backend.train_step(s.task_id, batch);
        } catch (const std::exception& e) {
          throw Error(ErrorCode::kRun, "backend failed at step " + std::to_string(step) + ": " + e.what());
        }
        ++step;
      }
    }

    CheckpointRecord record;
    record.step = step;
    record.epoch_position = position;
    TaskMetrics normalized;
    for (const auto& [id, task] : by_id) {
      double raw = 0.0;
      try {
        raw = backend.evaluate(task->spec, task->dev);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kRun, "evaluation failed at step " + std::to_string(step) + ": " + e.what());
      }
      record.per_task_dev[id] = raw;
      normalized[id] = std::clamp(normalize_metric(task->spec.metric_kind, raw), 0.0, 1.0);
    }
    record.selection_score = rule.score(normalized);
    StateToken state = backend.snapshot();
    record.state_hash = token_hash(state);
    if (result.history.empty() ||
        record.selection_score > result.history[result.best_index].selection_score) {
      result.best_index = result.history.size();
      result.best_state = std::move(state);
    }
    result.history.push_back(std::move(record));
    source.observe(position, normalized);
  }

  backend.restore(result.best_state);
  return result;
}

double evaluate_final(Trainable& backend, const TaskData& task) {
  require(task.dev.size() > 0, ErrorCode::kValidation, "task '" + task.spec.task_id + "' has no dev split");
  return 100.0 * backend.evaluate(task.spec, task.dev);
}

}  // namespace transel
