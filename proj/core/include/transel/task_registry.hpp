// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace transel {

enum class MetricKind { kAccuracy, kF1, kMatthewsCorr, kPearsonSpearmanAvg };
enum class DataFormat { kTsv, kJsonl, kSynthetic };

std::string_view to_string(MetricKind kind);
std::string_view to_string(DataFormat format);
MetricKind parse_metric_kind(std::string_view text);
DataFormat parse_data_format(std::string_view text);

/// Maps a raw metric value onto [0, 1]. Accuracy and F1 are already there;
/// correlations in [-1, 1] are shifted by (x + 1) / 2.
double normalize_metric(MetricKind kind, double raw);

/// Column names used when reading TSV files. Empty text_b means the task is
/// single-sentence.
struct TsvColumns {
  std::string text_a = "text_a";
  std::string text_b;
  std::string label = "label";

  bool operator==(const TsvColumns&) const = default;
};

struct TaskSpec {
  std::string task_id;
  std::string display_name;
  std::size_t train_size = 0;
  std::size_t dev_size = 0;
  MetricKind metric_kind = MetricKind::kAccuracy;
  DataFormat data_format = DataFormat::kTsv;
  // Class labels in index order; ignored when `regression` is set.
  std::vector<std::string> label_space;
  bool regression = false;
  TsvColumns columns;

  std::size_t class_count() const { return regression ? 1 : label_space.size(); }
  std::optional<std::size_t> label_index(std::string_view label) const;

  bool operator==(const TaskSpec&) const = default;
};

using TaskId = std::string;

/// Insertion-ordered task table. Built once, then shared read-only between
/// concurrently executing runs.
class Registry {
 public:
  TaskId register_task(TaskSpec spec);

  const TaskSpec& get(std::string_view task_id) const;
  bool contains(std::string_view task_id) const;
  std::size_t size() const { return tasks_.size(); }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  std::vector<TaskId> ids() const;

  // Ids ordered by training size, largest first. Ties keep insertion order.
  std::vector<TaskId> ids_by_size_descending() const;

  // Replaces the sizes of an already registered task once data is attached.
  void set_sizes(std::string_view task_id, std::size_t train_size, std::size_t dev_size);

  void save(const std::filesystem::path& path) const;
  static Registry load(const std::filesystem::path& path);

 private:
  std::vector<TaskSpec> tasks_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The nine GLUE tasks with their published training-set sizes, largest
/// first: MNLI, QQP, QNLI, SST-2, CoLA, STS-B, MRPC, RTE, WNLI.
Registry builtin_glue_registry();

std::size_t training_size(const Registry& registry, std::string_view task_id);

}  // namespace transel
