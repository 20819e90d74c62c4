// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transel/heuristic.hpp"
#include "transel/reporting.hpp"
#include "transel/run_store.hpp"
#include "transel/stats.hpp"
#include "transel/strategies.hpp"

namespace transel {

// ---------------------------------------------------------------------------
// Task data
// ---------------------------------------------------------------------------

using TaskCatalog = std::map<std::string, TaskData>;

struct SyntheticSpec {
  std::string task_id;
  std::size_t n_train = 1000;
  std::size_t n_dev = 200;
  std::size_t n_features = 16;
  std::size_t class_count = 2;
  double noise = 0.1;
};

/// Parses "name:n_train[:n_dev[:classes[:noise]]]".
SyntheticSpec parse_synthetic_spec(const std::string& text);
TaskData synthetic_task_data(const SyntheticSpec& spec, std::uint64_t data_seed);

/// Reads <dir>/<task_id>/{train,dev}.{tsv,jsonl} according to the spec's
/// data format.
TaskData load_task_data(const TaskSpec& spec, const std::filesystem::path& dir);

/// Training sizes of every task that has been run into a store, kept in
/// <store>/tasks.jsonl. A task re-registered with different sizes is an
/// integrity error.
void record_task_sizes(const RunStore& store, const TaskCatalog& catalog);
TaskSizes load_task_sizes(const RunStore& store);

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

enum class PlanKind { kPair, kMatrix, kSizeSweep, kMtlAll };
std::string_view to_string(PlanKind kind);

struct SweepOptions {
  double target_fraction = 1.0;  // 1.0 or 0.5
  std::vector<double> proportions = default_sweep_proportions();
  std::uint64_t data_seed = 0;   // subsampling seed
};

struct ExperimentPlan {
  PlanKind kind = PlanKind::kMatrix;
  std::vector<std::string> tasks;  // MATRIX, MTL_ALL
  std::string target;              // PAIR, SIZE_SWEEP
  std::string support;             // PAIR, SIZE_SWEEP
  std::vector<std::uint64_t> seeds = default_seeds();
  TrainConfig config;
  SamplingPolicy policy;
  std::optional<SweepOptions> sweep;
  std::string experiment = "main";

  void validate() const;
};

struct JobCounts {
  std::size_t mtl_pair = 0;
  std::size_t stilts_support = 0;
  std::size_t stilts_target = 0;
  std::size_t mtl_all = 0;

  std::size_t stilts() const { return stilts_support + stilts_target; }
  std::size_t total() const { return mtl_pair + stilts() + mtl_all; }
};

/// Records the plan will produce, counted without data or training. Support
/// stages are shared by every target of the same support task.
JobCounts enumerate(const ExperimentPlan& plan);

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct RunOptions {
  BackendFactory backend;
  std::string backend_name = "tiny";
  std::size_t jobs = 1;
  std::function<void(const std::string&)> log;  // progress lines; may be empty
};

struct ExecutionReport {
  std::size_t appended = 0;
  std::size_t skipped = 0;
};

/// Runs every job of the plan that is not already in the store. Jobs form a
/// DAG: a STILTs TARGET run is only dispatched once every SUPPORT run for its
/// support task is stored and the argmax is known. Support checkpoints are
/// kept as store blobs so that targets can resume after a restart.
ExecutionReport execute(const ExperimentPlan& plan, const TaskCatalog& catalog, RunStore& store,
                        const RunOptions& options);

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

struct AnalysisOptions {
  double alpha = 0.1;
  stats::TTestKind test = stats::TTestKind::kWelch;
  Prediction tiebreak = Prediction::kMtlPair;
  std::string experiment = "main";
};

struct AnalysisResult {
  stats::SignificanceMatrix matrix;
  reporting::Grid difference;
  std::vector<std::vector<std::optional<Prediction>>> predictions;
  reporting::AggregateTable table;
  HeuristicScore heuristic;
  reporting::Figure heatmap;
  TaskSizes sizes;
  std::string summary;
};

/// Pairwise cells from MTL_PAIR JOINT and STILTs TARGET records of the
/// experiment, axes sorted by training size (descending). Empty input is a
/// validation error; missing cells raise INCOMPLETE_CELL.
AnalysisResult analyze(const std::vector<RunRecord>& records, const TaskSizes& sizes,
                       const AnalysisOptions& options = {});

/// matrix.csv, cells.jsonl, predictions.csv, heatmap.svg, table.csv,
/// table.txt and summary.txt.
void write_analysis(const AnalysisResult& result, const std::filesystem::path& out_dir);

struct SweepPoint {
  double proportion = 0.0;
  std::size_t support_count = 0;
  std::vector<double> mtl;     // ordered by seed
  std::vector<double> stilts;  // ordered by seed
};

struct SweepResult {
  std::string target;
  std::string support;
  double target_fraction = 1.0;
  std::size_t effective_target_size = 0;
  std::vector<SweepPoint> points;  // ascending K
};

std::vector<SweepResult> collect_sweeps(const std::vector<RunRecord>& records,
                                        const std::string& experiment);

/// One SVG and CSV per sweep; returns the written paths.
std::vector<std::filesystem::path> write_sweep_reports(const std::vector<SweepResult>& sweeps,
                                                       const std::filesystem::path& out_dir);

}  // namespace transel
