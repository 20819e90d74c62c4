// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "transel/heuristic.hpp"
#include "transel/scheduler.hpp"
#include "transel/stats.hpp"

namespace transel::reporting {

/// Half-up rounding for display. Values are nudged by a relative 1e-9 first
/// so that decimal inputs such as 78.25 are not rounded down by their binary
/// representation.
double round_half_up(double value, int decimals = 1);
std::string format_fixed(double value, int decimals = 1);

// ---------------------------------------------------------------------------
// Difference matrix
// ---------------------------------------------------------------------------

/// Rows are targets, columns supports, both in the matrix's axis order.
struct Grid {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<std::optional<double>>> values;  // empty on the diagonal
};

/// mtl_mean - stilts_mean per cell; positive means joint training was better.
Grid difference_matrix(const stats::SignificanceMatrix& sig);

void write_grid_csv(std::ostream& out, const Grid& grid, int decimals = 6);

/// One JSON record per cell with means, stds, difference, label and test.
void write_cells_jsonl(std::ostream& out, const stats::SignificanceMatrix& sig);

// ---------------------------------------------------------------------------
// Aggregate table
// ---------------------------------------------------------------------------

enum class RowKind { kMtlAll, kAvgStilts, kAvgMtl, kAvgSh, kPairwiseOracle };
std::string_view to_string(RowKind kind);

struct TableRow {
  std::string name;
  RowKind kind = RowKind::kAvgMtl;
  std::map<std::string, std::optional<double>> scores;  // task -> score (0-100)
  std::optional<double> mean;  // full precision; absent if any score is
};

struct AggregateTable {
  std::vector<std::string> tasks;  // column order
  std::vector<TableRow> rows;

  const TableRow& row(std::string_view name) const;
};

std::optional<double> row_mean(const std::map<std::string, std::optional<double>>& scores);

/// Builds a table from given row values, computing the mean column. Used to
/// re-derive published means from their row values.
AggregateTable table_from_rows(std::vector<std::string> tasks,
                               const std::vector<std::pair<std::string, std::vector<double>>>& rows,
                               RowKind kind_for_all = RowKind::kAvgMtl);

using MtlAllScores = std::map<PolicyKind, std::map<std::string, double>>;

/// Rows: one MTL_ALL(<policy>) per policy in `mtl_all`, then AVG_STILTS,
/// AVG_MTL, AVG_SH and PAIRWISE_ORACLE. With `allow_missing_mtl_all` and no
/// MTL_ALL scores, an MTL_ALL(size) row with absent values is emitted instead
/// of failing. Missing pairwise cells throw kIncomplete.
AggregateTable aggregate_table(const stats::SignificanceMatrix& pairwise, const MtlAllScores& mtl_all,
                               const TaskSizes& sizes, Prediction tiebreak = Prediction::kMtlPair,
                               bool allow_missing_mtl_all = false);

void write_table_csv(std::ostream& out, const AggregateTable& table);
void write_table_text(std::ostream& out, const AggregateTable& table);

// ---------------------------------------------------------------------------
// Figures
// ---------------------------------------------------------------------------

struct HeatmapCellAnnotation {
  std::string target;
  std::string support;
  std::string color;  // "green" (STILTs better), "blue" (MTL better), "grey"
  bool red_numeral = false;
  double value = 0.0;
};

struct Figure {
  std::string svg;
  std::vector<HeatmapCellAnnotation> cells;
};

/// SVG heatmap of the difference grid. Cell colors come from the matrix
/// labels; numerals are red where a significant cell disagrees with the
/// (tie-resolved) size prediction. Each <rect> carries data-* attributes with
/// the same annotation that is returned.
Figure render_heatmap(const Grid& diff, const stats::SignificanceMatrix& sig,
                      const std::vector<std::vector<std::optional<Prediction>>>& predictions,
                      Prediction tiebreak = Prediction::kMtlPair);

struct SweepSeries {
  std::vector<double> proportions;                 // K values, ascending
  std::vector<std::vector<double>> samples;        // per K, one score per seed
};

struct SweepPointAnnotation {
  std::string method;  // "MTL" or "STILTS"
  double proportion = 0.0;
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

struct SweepFigure {
  std::string svg;
  std::vector<SweepPointAnnotation> points;
};

/// Two series over K with 90% t-intervals (n - 1 df) as error bars.
SweepFigure render_size_sweep(const SweepSeries& mtl, const SweepSeries& stilts,
                              std::string_view title = "support proportion K");

void write_sweep_csv(std::ostream& out, const SweepFigure& figure);

}  // namespace transel::reporting
