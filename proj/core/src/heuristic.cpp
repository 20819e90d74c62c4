// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/heuristic.hpp"

#include "transel/error.hpp"

namespace transel {

std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::kStilts: return "STILTS";
    case Prediction::kMtlPair: return "MTL_PAIR";
    case Prediction::kTie: return "TIE";
  }
  return "TIE";
}

Prediction select_strategy(std::size_t target_size, std::size_t support_size) {
  require(target_size >= 1 && support_size >= 1, ErrorCode::kValidation,
          "task sizes must be positive");
  if (support_size > target_size) return Prediction::kMtlPair;
  if (support_size < target_size) return Prediction::kStilts;
  return Prediction::kTie;
}

Prediction resolve(Prediction p, Prediction tiebreak) {
  return p == Prediction::kTie ? tiebreak : p;
}

bool agrees(stats::CellLabel label, Prediction resolved) {
  return (label == stats::CellLabel::kMtlBetter && resolved == Prediction::kMtlPair) ||
         (label == stats::CellLabel::kStiltsBetter && resolved == Prediction::kStilts);
}

namespace {

std::size_t size_of(const TaskSizes& sizes, const std::string& task) {
  auto it = sizes.find(task);
  require(it != sizes.end(), ErrorCode::kValidation, "no size for task '" + task + "'");
  return it->second;
}

}  // namespace

HeuristicScore heuristic_accuracy(const stats::SignificanceMatrix& matrix, const TaskSizes& sizes,
                                  Prediction tiebreak) {
  for (const auto& task : matrix.tasks) size_of(sizes, task);
  HeuristicScore score;
  for (const auto& [key, cell] : matrix.cells) {
    if (cell.label == stats::CellLabel::kNotSignificant) continue;
    ++score.total_significant;
    const Prediction p =
        resolve(select_strategy(size_of(sizes, key.target), size_of(sizes, key.support)), tiebreak);
    if (agrees(cell.label, p)) {
      ++score.correct;
    } else {
      score.misses.push_back(key);
    }
  }
  if (score.total_significant > 0) {
    score.accuracy = static_cast<double>(score.correct) / static_cast<double>(score.total_significant);
  }
  return score;
}

std::vector<std::vector<std::optional<Prediction>>> prediction_grid(
    const std::vector<std::string>& tasks, const TaskSizes& sizes) {
  std::vector<std::vector<std::optional<Prediction>>> grid(
      tasks.size(), std::vector<std::optional<Prediction>>(tasks.size()));
  for (std::size_t r = 0; r < tasks.size(); ++r) {
    for (std::size_t c = 0; c < tasks.size(); ++c) {
      if (r == c) continue;
      grid[r][c] = select_strategy(size_of(sizes, tasks[r]), size_of(sizes, tasks[c]));
    }
  }
  return grid;
}

void write_prediction_grid(std::ostream& out, const std::vector<std::string>& tasks,
                           const TaskSizes& sizes) {
  const auto grid = prediction_grid(tasks, sizes);
  out << "target\\support";
  for (const auto& t : tasks) out << ',' << t;
  out << '\n';
  for (std::size_t r = 0; r < tasks.size(); ++r) {
    out << tasks[r];
    for (std::size_t c = 0; c < tasks.size(); ++c) {
      out << ',';
      if (grid[r][c]) out << to_string(*grid[r][c]);
    }
    out << '\n';
  }
}

}  // namespace transel
