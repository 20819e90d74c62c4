// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "transel/rng.hpp"

namespace transel {

enum class PolicyKind { kUniform, kSize, kDynamic };
std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view text);

struct SamplingPolicy {
  PolicyKind kind = PolicyKind::kDynamic;
  double epsilon = 0.01;          // weight floor for dynamic updates
  double update_interval = 0.5;   // epochs between dynamic refreshes

  void validate() const;
};

using TaskSizes = std::map<std::string, std::size_t>;
using TaskMetrics = std::map<std::string, double>;

/// Per-task sampling distribution. Sums to 1 and has no zero entries.
struct TaskWeights {
  std::map<std::string, double> weights;

  double at(const std::string& task_id) const { return weights.at(task_id); }
  double total() const;
};

TaskWeights initial_weights(const SamplingPolicy& policy, const TaskSizes& sizes);

/// Headroom sampling: w_t proportional to max(1 - m_t, epsilon), where m_t is
/// the task's normalized dev metric.
TaskWeights dynamic_update(const TaskWeights& current, const TaskMetrics& dev_metrics,
                           double epsilon);

struct ScheduleStep {
  std::string task_id;
  std::vector<std::size_t> indices;

  bool operator==(const ScheduleStep&) const = default;
};

/// Every step is homogeneous in task; successive steps may alternate tasks.
struct BatchSchedule {
  std::vector<ScheduleStep> steps;
  std::size_t batch_size = 0;
  std::size_t epoch_index = 0;

  bool operator==(const BatchSchedule&) const = default;
};

/// ceil(sum(sizes) / batch_size).
std::size_t default_steps_per_epoch(const TaskSizes& sizes, std::size_t batch_size);

/// Draws the task of every step i.i.d. from `weights`; within a task, indices
/// walk a seeded permutation and a batch stops early at the end of the pool,
/// after which a fresh permutation starts.
BatchSchedule build_schedule(const TaskWeights& weights, const TaskSizes& split_sizes,
                             std::size_t batch_size, std::size_t steps_per_epoch,
                             std::uint64_t seed, std::size_t epoch_index = 0);

/// Audit format, one step per line: "<step>\t<task>\t<i0>,<i1>,...".
void dump_schedule(std::ostream& out, const BatchSchedule& schedule);

/// Stateful sampler for one epoch. Keeps per-task permutation cursors so that
/// a schedule can be built in several segments (one per checkpoint interval)
/// without breaking the no-repeat-before-exhaustion property.
class EpochSampler {
 public:
  EpochSampler(const TaskSizes& sizes, std::size_t batch_size, std::uint64_t seed,
               std::size_t epoch_index);

  ScheduleStep draw(const TaskWeights& weights);

 private:
  struct Cursor {
    std::vector<std::size_t> permutation;
    std::size_t position = 0;
    Rng rng{0};
  };

  std::size_t batch_size_;
  std::map<std::string, Cursor> cursors_;
  Rng task_rng_;
};

/// Where the training loop gets its batches. The loop asks for one segment
/// at a time and reports normalized dev metrics back at every checkpoint.
class ScheduleSource {
 public:
  virtual ~ScheduleSource() = default;
  virtual std::size_t steps_per_epoch() const = 0;
  virtual BatchSchedule segment(std::size_t epoch_index, std::size_t steps) = 0;
  virtual void observe(double epoch_position, const TaskMetrics& normalized_dev) {
    (void)epoch_position;
    (void)normalized_dev;
  }
  virtual TaskWeights current_weights() const = 0;
};

class PolicyScheduleSource final : public ScheduleSource {
 public:
  PolicyScheduleSource(SamplingPolicy policy, TaskSizes sizes, std::size_t batch_size,
                       std::uint64_t seed);

  std::size_t steps_per_epoch() const override { return steps_per_epoch_; }
  BatchSchedule segment(std::size_t epoch_index, std::size_t steps) override;
  void observe(double epoch_position, const TaskMetrics& normalized_dev) override;
  TaskWeights current_weights() const override { return weights_; }

 private:
  SamplingPolicy policy_;
  TaskSizes sizes_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t steps_per_epoch_;
  TaskWeights weights_;
  double last_update_ = 0.0;
  std::size_t epoch_ = static_cast<std::size_t>(-1);
  std::unique_ptr<EpochSampler> sampler_;
};

}  // namespace transel
