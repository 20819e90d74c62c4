// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "transel/heuristic.hpp"
#include "transel/rng.hpp"
#include "transel/task_registry.hpp"

namespace transel {
namespace {

using stats::CellLabel;

TEST(SelectStrategy, GlueExamples) {
  const Registry glue = builtin_glue_registry();
  const auto size = [&](std::string_view id) { return training_size(glue, id); };
  EXPECT_EQ(select_strategy(size("RTE"), size("MNLI")), Prediction::kMtlPair);
  EXPECT_EQ(select_strategy(size("MNLI"), size("RTE")), Prediction::kStilts);
  for (const auto& s : glue.ids_by_size_descending()) {
    if (s == "MNLI") continue;
    EXPECT_EQ(select_strategy(size("MNLI"), size(s)), Prediction::kStilts) << s;
  }
  EXPECT_EQ(select_strategy(1000, 1000), Prediction::kTie);
}

TEST(SelectStrategyProperty, AntisymmetricAndScaleInvariant) {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t a = 1 + rng.below(500000), b = 1 + rng.below(500000);
    const Prediction ab = select_strategy(a, b);
    const Prediction ba = select_strategy(b, a);
    if (a == b) {
      ASSERT_EQ(ab, Prediction::kTie);
    } else {
      ASSERT_NE(ab, Prediction::kTie);
      ASSERT_NE(ab, ba);
      ASSERT_NE(ba, Prediction::kTie);
    }
    const std::size_t c = 1 + rng.below(1000);
    ASSERT_EQ(select_strategy(a * c, b * c), ab);
  }
}

TEST(Resolve, TieBreak) {
  EXPECT_EQ(resolve(Prediction::kTie), Prediction::kMtlPair);
  EXPECT_EQ(resolve(Prediction::kTie, Prediction::kStilts), Prediction::kStilts);
  EXPECT_EQ(resolve(Prediction::kStilts), Prediction::kStilts);
  EXPECT_TRUE(agrees(CellLabel::kMtlBetter, Prediction::kMtlPair));
  EXPECT_FALSE(agrees(CellLabel::kMtlBetter, Prediction::kStilts));
  EXPECT_TRUE(agrees(CellLabel::kStiltsBetter, Prediction::kStilts));
}

stats::SignificanceMatrix labelled_matrix(const std::vector<std::string>& tasks,
                                          const std::map<stats::CellKey, CellLabel>& labels) {
  stats::SignificanceMatrix m;
  m.tasks = tasks;
  for (const auto& [key, label] : labels) {
    stats::Cell c;
    c.label = label;
    c.test.significant = label != CellLabel::kNotSignificant;
    c.test.p_value = c.test.significant ? 0.01 : 0.5;
    c.difference = label == CellLabel::kMtlBetter ? 1.0 : label == CellLabel::kStiltsBetter ? -1.0 : 0.0;
    m.cells[key] = c;
  }
  return m;
}

TEST(HeuristicAccuracyProperty, MatchesDirectCount) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(6);
    std::vector<std::string> tasks;
    TaskSizes sizes;
    for (std::size_t i = 0; i < n; ++i) {
      tasks.push_back("T" + std::to_string(i));
      sizes[tasks.back()] = 100 * (1 + rng.below(4));  // ties are common
    }
    std::map<stats::CellKey, CellLabel> labels;
    for (const auto& t : tasks)
      for (const auto& s : tasks)
        if (t != s) labels[{t, s}] = static_cast<CellLabel>(rng.below(3));

    const Prediction tiebreak = rng.below(2) ? Prediction::kMtlPair : Prediction::kStilts;
    std::size_t correct = 0, significant = 0;
    for (const auto& [key, label] : labels) {
      if (label == CellLabel::kNotSignificant) continue;
      ++significant;
      const std::size_t ts = sizes[key.target], ss = sizes[key.support];
      const Prediction p = ss > ts ? Prediction::kMtlPair : ss < ts ? Prediction::kStilts : tiebreak;
      const bool mtl = label == CellLabel::kMtlBetter;
      if (mtl == (p == Prediction::kMtlPair)) ++correct;
    }

    const auto score = heuristic_accuracy(labelled_matrix(tasks, labels), sizes, tiebreak);
    ASSERT_EQ(score.total_significant, significant);
    ASSERT_EQ(score.correct, correct);
    ASSERT_EQ(score.misses.size(), significant - correct);
    if (significant == 0) {
      ASSERT_FALSE(score.accuracy.has_value());
    } else {
      ASSERT_DOUBLE_EQ(*score.accuracy, static_cast<double>(correct) / significant);
    }
  }
}

TEST(HeuristicAccuracy, AllNotSignificantIsAbsent) {
  const auto m = labelled_matrix({"A", "B"}, {{{"A", "B"}, CellLabel::kNotSignificant},
                                              {{"B", "A"}, CellLabel::kNotSignificant}});
  const auto score = heuristic_accuracy(m, {{"A", 10}, {"B", 20}});
  EXPECT_EQ(score.total_significant, 0u);
  EXPECT_FALSE(score.accuracy.has_value());
}

TEST(HeuristicAccuracy, GlueFixtureScoresFortyNineOfFiftyThree) {
  const Registry glue = builtin_glue_registry();
  const auto order = glue.ids_by_size_descending();
  const auto m = stats::build_significance_matrix(testing::glue_heuristic_samples(), order);
  TaskSizes sizes;
  for (const auto& id : order) sizes[id] = training_size(glue, id);

  EXPECT_EQ(m.significant_count(), 53u);
  const auto score = heuristic_accuracy(m, sizes);
  EXPECT_EQ(score.correct, 49u);
  EXPECT_EQ(score.total_significant, 53u);
  EXPECT_NEAR(100.0 * *score.accuracy, 92.5, 0.05);
  auto misses = score.misses;
  auto expected = testing::glue_heuristic_misses();
  std::sort(misses.begin(), misses.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(misses, expected);
  EXPECT_EQ(m.at("WNLI", "STS-B").label, CellLabel::kNotSignificant);
  for (const auto& s : order) {
    if (s != "MNLI") EXPECT_EQ(m.at("MNLI", s).label, CellLabel::kStiltsBetter) << s;
  }
}

TEST(PredictionGrid, DiagonalEmptyAndCsv) {
  const std::vector<std::string> tasks = {"A", "B"};
  const TaskSizes sizes = {{"A", 200}, {"B", 100}};
  const auto grid = prediction_grid(tasks, sizes);
  EXPECT_FALSE(grid[0][0].has_value());
  EXPECT_EQ(*grid[0][1], Prediction::kStilts);
  EXPECT_EQ(*grid[1][0], Prediction::kMtlPair);
  std::ostringstream out;
  write_prediction_grid(out, tasks, sizes);
  EXPECT_NE(out.str().find("STILTS"), std::string::npos);
  EXPECT_NE(out.str().find("MTL_PAIR"), std::string::npos);
}

}  // namespace
}  // namespace transel
