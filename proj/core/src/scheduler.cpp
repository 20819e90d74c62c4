// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/scheduler.hpp"

#include <algorithm>
#include <numeric>

#include "transel/error.hpp"

namespace transel {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kUniform: return "uniform";
    case PolicyKind::kSize: return "size";
    case PolicyKind::kDynamic: return "dynamic";
  }
  return "dynamic";
}

PolicyKind parse_policy_kind(std::string_view text) {
  for (auto kind : {PolicyKind::kUniform, PolicyKind::kSize, PolicyKind::kDynamic}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::kValidation, "unknown sampling policy '" + std::string(text) + "'");
}

void SamplingPolicy::validate() const {
  require(epsilon > 0.0, ErrorCode::kValidation, "epsilon must be positive");
  require(update_interval > 0.0, ErrorCode::kValidation, "update_interval must be positive");
}

double TaskWeights::total() const {
  double sum = 0.0;
  for (const auto& [_, w] : weights) sum += w;
  return sum;
}

TaskWeights initial_weights(const SamplingPolicy& policy, const TaskSizes& sizes) {
  policy.validate();
  require(!sizes.empty(), ErrorCode::kValidation, "at least one task is required");
  for (const auto& [task, n] : sizes) {
    require(n >= 1, ErrorCode::kValidation, "task '" + task + "' has no training examples");
  }
  TaskWeights out;
  if (policy.kind == PolicyKind::kSize) {
    double total = 0.0;
    for (const auto& [_, n] : sizes) total += static_cast<double>(n);
    for (const auto& [task, n] : sizes) out.weights[task] = static_cast<double>(n) / total;
  } else {
    // Dynamic starts uniform: there is no dev signal before the first checkpoint.
    const double w = 1.0 / static_cast<double>(sizes.size());
    for (const auto& [task, _] : sizes) out.weights[task] = w;
  }
  return out;
}

TaskWeights dynamic_update(const TaskWeights& current, const TaskMetrics& dev_metrics,
                           double epsilon) {
  require(epsilon > 0.0, ErrorCode::kValidation, "epsilon must be positive");
  require(!current.weights.empty(), ErrorCode::kValidation, "no tasks to update");
  TaskWeights out;
  double total = 0.0;
  for (const auto& [task, _] : current.weights) {
    auto it = dev_metrics.find(task);
    require(it != dev_metrics.end(), ErrorCode::kValidation, "no dev metric for task '" + task + "'");
    const double m = it->second;
    require(m >= 0.0 && m <= 1.0, ErrorCode::kValidation,
            "dev metric for '" + task + "' outside [0, 1]");
    const double gap = std::max(1.0 - m, epsilon);
    out.weights[task] = gap;
    total += gap;
  }
  for (auto& [_, w] : out.weights) w /= total;
  return out;
}

std::size_t default_steps_per_epoch(const TaskSizes& sizes, std::size_t batch_size) {
  require(batch_size >= 1, ErrorCode::kValidation, "batch_size must be >= 1");
  std::size_t total = 0;
  for (const auto& [_, n] : sizes) total += n;
  return (total + batch_size - 1) / batch_size;
}

EpochSampler::EpochSampler(const TaskSizes& sizes, std::size_t batch_size, std::uint64_t seed,
                           std::size_t epoch_index)
    : batch_size_(batch_size), task_rng_(mix_seed(mix_seed(seed, "task-draw"), epoch_index)) {
  require(batch_size >= 1, ErrorCode::kValidation, "batch_size must be >= 1");
  for (const auto& [task, n] : sizes) {
    Cursor c;
    c.rng = Rng(mix_seed(mix_seed(seed, "perm:" + task), epoch_index));
    c.permutation.resize(n);
    std::iota(c.permutation.begin(), c.permutation.end(), 0);
    c.rng.shuffle(std::span<std::size_t>(c.permutation));
    cursors_.emplace(task, std::move(c));
  }
}

ScheduleStep EpochSampler::draw(const TaskWeights& weights) {
  const double u = task_rng_.uniform() * weights.total();
  double acc = 0.0;
  const std::string* chosen = &weights.weights.rbegin()->first;
  for (const auto& [task, w] : weights.weights) {
    acc += w;
    if (u < acc) {
      chosen = &task;
      break;
    }
  }
  auto it = cursors_.find(*chosen);
  require(it != cursors_.end(), ErrorCode::kValidation, "no split size for task '" + *chosen + "'");
  Cursor& c = it->second;
  require(!c.permutation.empty(), ErrorCode::kValidation,
          "task '" + *chosen + "' has nonzero weight but no examples");

  if (c.position == c.permutation.size()) {
    c.rng.shuffle(std::span<std::size_t>(c.permutation));
    c.position = 0;
  }
  const std::size_t take = std::min(batch_size_, c.permutation.size() - c.position);
  ScheduleStep step{*chosen, {}};
  step.indices.assign(c.permutation.begin() + static_cast<std::ptrdiff_t>(c.position),
                      c.permutation.begin() + static_cast<std::ptrdiff_t>(c.position + take));
  c.position += take;
  return step;
}

BatchSchedule build_schedule(const TaskWeights& weights, const TaskSizes& split_sizes,
                             std::size_t batch_size, std::size_t steps_per_epoch,
                             std::uint64_t seed, std::size_t epoch_index) {
  require(batch_size >= 1, ErrorCode::kValidation, "batch_size must be >= 1");
  require(steps_per_epoch >= 1, ErrorCode::kValidation, "steps_per_epoch must be >= 1");
  require(!weights.weights.empty(), ErrorCode::kValidation, "weights are empty");
  for (const auto& [task, w] : weights.weights) {
    auto it = split_sizes.find(task);
    require(it != split_sizes.end(), ErrorCode::kValidation, "no split size for task '" + task + "'");
    require(!(w > 0.0 && it->second == 0), ErrorCode::kValidation,
            "task '" + task + "' has nonzero weight but no examples");
  }
  EpochSampler sampler(split_sizes, batch_size, seed, epoch_index);
  BatchSchedule schedule{{}, batch_size, epoch_index};
  schedule.steps.reserve(steps_per_epoch);
  for (std::size_t s = 0; s < steps_per_epoch; ++s) schedule.steps.push_back(sampler.draw(weights));
  return schedule;
}

void dump_schedule(std::ostream& out, const BatchSchedule& schedule) {
  for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
    const auto& step = schedule.steps[s];
    out << s << '\t' << step.task_id << '\t';
    for (std::size_t i = 0; i < step.indices.size(); ++i) {
      if (i) out << ',';
      out << step.indices[i];
    }
    out << '\n';
  }
}

PolicyScheduleSource::PolicyScheduleSource(SamplingPolicy policy, TaskSizes sizes,
                                           std::size_t batch_size, std::uint64_t seed)
    : policy_(policy),
      sizes_(std::move(sizes)),
      batch_size_(batch_size),
      seed_(seed),
      steps_per_epoch_(default_steps_per_epoch(sizes_, batch_size)),
      weights_(initial_weights(policy_, sizes_)) {}

BatchSchedule PolicyScheduleSource::segment(std::size_t epoch_index, std::size_t steps) {
  if (!sampler_ || epoch_index != epoch_) {
    sampler_ = std::make_unique<EpochSampler>(sizes_, batch_size_, seed_, epoch_index);
    epoch_ = epoch_index;
  }
  BatchSchedule schedule{{}, batch_size_, epoch_index};
  schedule.steps.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) schedule.steps.push_back(sampler_->draw(weights_));
  return schedule;
}

void PolicyScheduleSource::observe(double epoch_position, const TaskMetrics& normalized_dev) {
  if (policy_.kind != PolicyKind::kDynamic) return;
  if (epoch_position + 1e-9 < last_update_ + policy_.update_interval) return;
  weights_ = dynamic_update(weights_, normalized_dev, policy_.epsilon);
  last_update_ = epoch_position;
}

}  // namespace transel
