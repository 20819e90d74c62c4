// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "transel/task_registry.hpp"

namespace transel {

enum class Split { kTrain, kDev, kTest };
std::string_view to_string(Split split);

struct Example {
  std::size_t example_id = 0;
  std::string text_a;
  std::optional<std::string> text_b;
  // Class index for classification tasks, the target value for regression.
  double label = 0.0;

  bool operator==(const Example&) const = default;
};

struct SplitData {
  std::string task_id;
  Split split = Split::kTrain;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool operator==(const SplitData&) const = default;
};

/// Reads a TSV (header row, columns named by spec.columns) or JSONL file
/// (keys text_a, text_b, label). Throws kIo for a missing file and kParse
/// with the 1-based line number for a malformed row.
SplitData load_split(const std::filesystem::path& path, const TaskSpec& spec, Split split);

enum class SubsampleMode { kFraction, kCount, kProportionOfTarget };
std::string_view to_string(SubsampleMode mode);

struct SubsampleSpec {
  SubsampleMode mode = SubsampleMode::kFraction;
  double value = 1.0;
  std::uint64_t seed = 0;
};

/// The size-sweep proportions K, as used for the support task.
const std::vector<double>& default_sweep_proportions();

/// floor(value * base), tolerant of the representation error in values like
/// 1/3 so that K * n lands on the intended integer.
std::size_t floor_count(double value, std::size_t base);

/// Number of examples `subsample` will return. Validates the spec.
std::size_t requested_count(const SubsampleSpec& spec, std::size_t available,
                            std::optional<std::size_t> target_size);

/// Uniform draw without replacement, seeded. The selected examples keep their
/// original ids and relative order.
SplitData subsample(const SplitData& split, const SubsampleSpec& spec,
                    std::optional<std::size_t> target_size = std::nullopt);

struct SubsampleManifest {
  std::string task_id;
  SubsampleMode mode = SubsampleMode::kFraction;
  double value = 1.0;
  std::uint64_t seed = 0;
  std::size_t source_count = 0;
  std::size_t result_count = 0;

  std::string to_line() const;  // single-line JSON
  bool operator==(const SubsampleManifest&) const = default;
};

SubsampleManifest make_manifest(const SplitData& source, const SubsampleSpec& spec,
                                std::size_t result_count);
void write_manifest(const std::filesystem::path& path, const SubsampleManifest& manifest);

/// A classification task whose clean labels are argmax_c w_c . x over a fixed
/// feature vector x. Features are written into text_a as "f<j>:<value>"
/// tokens so that any bag-of-token backend can read them. Exactly
/// round(noise * n) labels per split are flipped to a different class.
struct SyntheticTask {
  TaskSpec spec;
  SplitData train;
  SplitData dev;
  // class_count rows of n_features generating weights.
  std::vector<std::vector<double>> weights;
  // Indices (into dev.examples) whose label was flipped.
  std::vector<std::size_t> flipped_dev;
};

SyntheticTask make_synthetic_task(std::string task_id, std::size_t n_train, std::size_t n_dev,
                                  std::size_t n_features, std::size_t class_count, double noise,
                                  std::uint64_t seed);

}  // namespace transel
