// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <gtest/gtest.h>

#include "transel/metrics.hpp"

namespace transel {
namespace {

TEST(Metrics, AccuracyExtremes) {
  const std::vector<double> gold = {0, 1, 1, 0};
  EXPECT_DOUBLE_EQ(metrics::accuracy(gold, gold), 1.0);
  EXPECT_DOUBLE_EQ(metrics::accuracy(std::vector<double>{1, 0, 0, 1}, gold), 0.0);
}

// Confusion matrix TP=6, TN=3, FP=1, FN=2 worked by hand:
// (6*3 - 1*2) / sqrt(7 * 8 * 4 * 5) = 16 / sqrt(1120).
TEST(Metrics, MatthewsHandComputedBinary) {
  std::vector<double> pred, gold;
  auto add = [&](double p, double g, int n) {
    for (int i = 0; i < n; ++i) {
      pred.push_back(p);
      gold.push_back(g);
    }
  };
  add(1, 1, 6);
  add(0, 0, 3);
  add(1, 0, 1);
  add(0, 1, 2);
  EXPECT_NEAR(metrics::matthews_corr(pred, gold, 2), 0.47809144373375745, 1e-15);
}

TEST(Metrics, MatthewsMulticlass) {
  const std::vector<double> pred = {0, 1, 2, 0, 1, 2, 0, 2, 1, 1};
  const std::vector<double> gold = {0, 1, 2, 1, 1, 0, 0, 2, 2, 1};
  EXPECT_NEAR(metrics::matthews_corr(pred, gold, 3), 0.5454545454545454, 1e-15);
}

TEST(Metrics, MatthewsDegenerateIsZero) {
  const std::vector<double> pred = {1, 1, 1, 1};
  const std::vector<double> gold = {0, 1, 0, 1};
  EXPECT_DOUBLE_EQ(metrics::matthews_corr(pred, gold, 2), 0.0);
}

TEST(Metrics, F1OnPositiveClass) {
  // TP=2, FP=1, FN=1 -> precision 2/3, recall 2/3.
  const std::vector<double> pred = {1, 1, 1, 0, 0};
  const std::vector<double> gold = {1, 1, 0, 1, 0};
  EXPECT_NEAR(metrics::f1_binary(pred, gold), 2.0 / 3.0, 1e-15);
}

TEST(Metrics, SpearmanWithTies) {
  EXPECT_NEAR(metrics::spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 3, 2, 4}),
              0.9486832980505139, 1e-14);
}

TEST(Metrics, PearsonSpearmanAverage) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 1, 4, 3, 5};
  EXPECT_NEAR(metrics::pearson(x, y), 0.8, 1e-14);
  EXPECT_NEAR(metrics::compute(MetricKind::kPearsonSpearmanAvg, x, y, 1), 0.8, 1e-14);
}

}  // namespace
}  // namespace transel
