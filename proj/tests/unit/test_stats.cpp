// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "t_oracle.hpp"
#include "transel/error.hpp"
#include "transel/rng.hpp"
#include "transel/stats.hpp"

namespace transel {
namespace {

using stats::CellLabel;
using stats::TTestKind;

std::vector<double> random_sample(Rng& rng, std::size_t n, double mean, double sd) {
  std::vector<double> v(n);
  for (auto& x : v) x = mean + sd * rng.normal();
  return v;
}

TEST(Aggregate, Examples) {
  auto s = stats::aggregate(std::vector<double>{10, 10, 10});
  EXPECT_DOUBLE_EQ(s.mean, 10);
  EXPECT_DOUBLE_EQ(*s.std, 0);
  s = stats::aggregate(std::vector<double>{1, 2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(s.mean, 3);
  EXPECT_NEAR(*s.std, std::sqrt(2.5), 1e-15);
  s = stats::aggregate(std::vector<double>{7});
  EXPECT_DOUBLE_EQ(s.mean, 7);
  EXPECT_FALSE(s.std.has_value());
  EXPECT_THROW(stats::aggregate(std::vector<double>{}), Error);
}

TEST(AggregateProperty, MatchesTwoPassLongDouble) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto v = random_sample(rng, 2 + rng.below(20), 50, 10);
    long double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    long double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    const auto s = stats::aggregate(v);
    ASSERT_NEAR(s.mean, static_cast<double>(m), 1e-12);
    ASSERT_NEAR(*s.std, static_cast<double>(std::sqrt(ss / (v.size() - 1))), 1e-12);
  }
}

TEST(TTest, ShiftedRanges) {
  const auto r = stats::t_test(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 3, 4, 5, 6});
  EXPECT_NEAR(r.t_statistic, -1.0, 1e-15);
  EXPECT_NEAR(r.degrees_of_freedom, 8.0, 1e-12);
  EXPECT_NEAR(r.p_value, static_cast<double>(testing::two_sided_p(-1, 8)), 1e-12);
  EXPECT_NEAR(r.p_value, 0.34659350708733416, 1e-12);
  EXPECT_FALSE(r.significant);
}

TEST(TTest, UnequalVariancesAgainstReferenceValues) {
  const std::vector<double> a = {1.0, 2.5, 2.0, 4.0};
  const std::vector<double> b = {3.0, 3.5, 5.0, 6.5, 7.0, 4.0};
  const auto w = stats::t_test(a, b);
  EXPECT_NEAR(w.t_statistic, -2.6901684402665635, 1e-12);
  EXPECT_NEAR(w.degrees_of_freedom, 7.716611856368111, 1e-10);
  EXPECT_NEAR(w.p_value, 0.028399901980892376, 1e-10);
  const auto s = stats::t_test(a, b, 0.1, TTestKind::kStudent);
  EXPECT_NEAR(s.t_statistic, -2.5374877202926203, 1e-12);
  EXPECT_DOUBLE_EQ(s.degrees_of_freedom, 8.0);
  EXPECT_NEAR(s.p_value, 0.03484680223162566, 1e-10);
}

TEST(TTest, DegenerateSamples) {
  auto r = stats::t_test(std::vector<double>{3, 4, 5}, std::vector<double>{3, 4, 5});
  EXPECT_EQ(r.t_statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_FALSE(r.significant);
  r = stats::t_test(std::vector<double>{5, 5, 5}, std::vector<double>{5, 5, 5});
  EXPECT_EQ(r.p_value, 1.0);
  r = stats::t_test(std::vector<double>{0, 0, 0, 0, 0}, std::vector<double>{1, 1, 1, 1, 1});
  EXPECT_EQ(r.p_value, 0.0);
  EXPECT_TRUE(r.significant);
  EXPECT_EQ(r.t_statistic, -std::numeric_limits<double>::infinity());
  EXPECT_THROW(stats::t_test(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

class TTestOracle : public ::testing::TestWithParam<TTestKind> {};

TEST_P(TTestOracle, MatchesNumericalIntegration) {
  Rng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_sample(rng, 2 + rng.below(9), 70, 0.5 + 5 * rng.uniform());
    const auto b = random_sample(rng, 2 + rng.below(9), 70 + 6 * (rng.uniform() - 0.5), 0.5 + 5 * rng.uniform());
    const auto ref = GetParam() == TTestKind::kWelch ? testing::welch(a, b) : testing::student(a, b);
    const auto r = stats::t_test(a, b, 0.1, GetParam());
    ASSERT_NEAR(r.t_statistic, static_cast<double>(ref.t), 1e-9 * std::max(1.0, std::fabs(r.t_statistic)));
    ASSERT_NEAR(r.degrees_of_freedom, static_cast<double>(ref.df), 1e-9 * r.degrees_of_freedom);
    ASSERT_NEAR(r.p_value, static_cast<double>(ref.p), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(BothKinds, TTestOracle, ::testing::Values(TTestKind::kWelch, TTestKind::kStudent));

TEST(TTestProperty, AntisymmetryAndAlphaMonotonicity) {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_sample(rng, 2 + rng.below(9), 0, 1);
    const auto b = random_sample(rng, 2 + rng.below(9), rng.uniform(), 1);
    const auto ab = stats::t_test(a, b);
    const auto ba = stats::t_test(b, a);
    ASSERT_EQ(ab.t_statistic, -ba.t_statistic);
    ASSERT_EQ(ab.p_value, ba.p_value);
    ASSERT_GE(ab.p_value, 0.0);
    ASSERT_LE(ab.p_value, 1.0);
    bool was_significant = false;
    for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
      const bool sig = stats::t_test(a, b, alpha).significant;
      ASSERT_TRUE(!was_significant || sig);
      ASSERT_EQ(sig, ab.p_value < alpha);
      was_significant = sig;
    }
  }
}

TEST(Distribution, CdfAndQuantile) {
  EXPECT_NEAR(stats::student_t_quantile(0.95, 4), 2.131846786326649, 1e-10);
  for (double df : {1.0, 2.5, 4.0, 30.0}) {
    for (double t : {-3.0, -0.4, 0.0, 1.7}) {
      EXPECT_NEAR(stats::student_t_cdf(t, df), static_cast<double>(testing::t_cdf(t, df)), 1e-10);
    }
  }
}

TEST(ConfidenceInterval, HalfWidth) {
  const std::vector<double> v = {88.1, 89.4, 90.2, 87.6, 89.0};
  const auto s = stats::aggregate(v);
  EXPECT_NEAR(stats::confidence_half_width(v, 0.90),
              static_cast<double>(testing::t_quantile(0.95L, 4)) * *s.std / std::sqrt(5.0), 1e-10);
  EXPECT_EQ(stats::confidence_half_width(std::vector<double>{3, 3, 3}), 0.0);
}

TEST(Matrix, LabelsFollowTestAndSign) {
  std::map<stats::CellKey, stats::CellSamples> samples;
  samples[{"A", "B"}] = {std::vector<double>(5, 60.0), std::vector<double>(5, 50.0)};
  samples[{"B", "A"}] = {std::vector<double>{50, 51, 52, 53, 54}, std::vector<double>{54, 53, 52, 51, 50}};
  const auto m = stats::build_significance_matrix(samples, {"A", "B"});
  EXPECT_EQ(m.at("A", "B").label, CellLabel::kMtlBetter);
  EXPECT_DOUBLE_EQ(m.at("A", "B").difference, 10.0);
  EXPECT_EQ(m.at("B", "A").label, CellLabel::kNotSignificant);
  for (const auto& [key, cell] : m.cells) {
    EXPECT_EQ(cell.label, stats::label_for(cell.test, cell.difference));
    EXPECT_EQ(cell.test.significant, cell.test.p_value < cell.test.alpha);
  }
}

TEST(Matrix, SeededNoiseEqualMeansNotSignificant) {
  Rng rng(4);
  auto a = random_sample(rng, 5, 0, 2);
  auto b = random_sample(rng, 5, 0, 2);
  // Centre both on exactly 70 so the means agree.
  const double ma = stats::aggregate(a).mean, mb = stats::aggregate(b).mean;
  for (auto& x : a) x += 70 - ma;
  for (auto& x : b) x += 70 - mb;
  std::map<stats::CellKey, stats::CellSamples> samples;
  samples[{"A", "B"}] = {a, b};
  samples[{"B", "A"}] = {a, b};
  const auto m = stats::build_significance_matrix(samples, {"A", "B"});
  EXPECT_EQ(m.at("A", "B").label, CellLabel::kNotSignificant);
  EXPECT_GT(m.at("A", "B").test.p_value, 0.99);
  EXPECT_NEAR(m.at("A", "B").test.p_value,
              static_cast<double>(testing::welch(a, b).p), 1e-10);
}

TEST(Matrix, LargeDifferenceHighVarianceCanBeNotSignificant) {
  std::map<stats::CellKey, stats::CellSamples> samples;
  samples[{"WNLI", "STS-B"}] = {std::vector<double>{56.3, 30.0, 80.0, 60.0, 70.0},
                                std::vector<double>{56.3, 40.0, 35.0, 62.0, 58.0}};
  samples[{"STS-B", "WNLI"}] = {std::vector<double>{1, 2}, std::vector<double>{1, 2}};
  const auto m = stats::build_significance_matrix(samples, {"STS-B", "WNLI"});
  const auto& cell = m.at("WNLI", "STS-B");
  EXPECT_NEAR(cell.difference, 9.0, 1e-9);
  EXPECT_EQ(cell.label, CellLabel::kNotSignificant);
}

TEST(Matrix, IncompleteCellsAreAllNamed) {
  std::map<stats::CellKey, stats::CellSamples> samples;
  samples[{"A", "B"}] = {std::vector<double>{1, 2}, std::nullopt};
  try {
    stats::build_significance_matrix(samples, {"A", "B"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteCell);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(A, B)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(B, A)"), std::string::npos) << msg;
  }
}

}  // namespace
}  // namespace transel
