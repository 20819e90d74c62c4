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

#include "transel/scheduler.hpp"
#include "transel/stats.hpp"

namespace transel {

enum class Prediction { kStilts, kMtlPair, kTie };
std::string_view to_string(Prediction p);

struct HeuristicPrediction {
  std::string target_task;
  std::string support_task;
  Prediction predicted = Prediction::kTie;
};

/// Joint training when the supporting task is larger than the target,
/// sequential transfer when it is smaller, TIE when sizes are equal.
Prediction select_strategy(std::size_t target_size, std::size_t support_size);

/// TIE becomes `tiebreak`; other predictions pass through.
Prediction resolve(Prediction p, Prediction tiebreak = Prediction::kMtlPair);

/// Whether a significant cell label matches a (resolved) prediction.
bool agrees(stats::CellLabel label, Prediction resolved);

struct HeuristicScore {
  std::size_t correct = 0;
  std::size_t total_significant = 0;
  std::optional<double> accuracy;      // absent when no cell is significant
  std::vector<stats::CellKey> misses;  // significant cells the heuristic gets wrong
};

/// Scores the size heuristic on the significant cells of `matrix` only.
HeuristicScore heuristic_accuracy(const stats::SignificanceMatrix& matrix, const TaskSizes& sizes,
                                  Prediction tiebreak = Prediction::kMtlPair);

/// Grid of predictions in the matrix's axis order (rows: target, columns:
/// support). Diagonal entries are empty.
std::vector<std::vector<std::optional<Prediction>>> prediction_grid(
    const std::vector<std::string>& tasks, const TaskSizes& sizes);

void write_prediction_grid(std::ostream& out, const std::vector<std::string>& tasks,
                           const TaskSizes& sizes);

}  // namespace transel
