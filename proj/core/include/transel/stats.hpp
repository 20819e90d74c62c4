// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace transel::stats {

// ---------------------------------------------------------------------------
// Student t distribution
// ---------------------------------------------------------------------------

/// I_x(a, b) by the modified Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

/// P(|T| >= |t|) for T ~ t(df).
double student_t_two_sided_p(double t, double df);

/// Inverse CDF; p in (0, 1).
double student_t_quantile(double p, double df);

// ---------------------------------------------------------------------------
// Samples and tests
// ---------------------------------------------------------------------------

struct Summary {
  double mean = 0.0;
  std::optional<double> std;  // sample std (n - 1); absent for n = 1
  std::size_t n = 0;
};

Summary aggregate(std::span<const double> values);

/// Half-width of the two-sided `level` confidence interval of the mean:
/// t_{(1+level)/2, n-1} * s / sqrt(n). Zero for constant samples.
double confidence_half_width(std::span<const double> values, double level = 0.90);

enum class TTestKind { kWelch, kStudent };
std::string_view to_string(TTestKind kind);
TTestKind parse_ttest_kind(std::string_view text);

struct TestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  double alpha = 0.1;
  bool significant = false;  // p_value < alpha
};

/// Two-sided two-sample t-test of mean(a) - mean(b). Welch (unequal
/// variances, Welch-Satterthwaite df) by default.
///
/// Both samples constant: equal means give t = 0, p = 1; distinct means give
/// t = +/-inf, p = 0.
TestResult t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.1,
                  TTestKind kind = TTestKind::kWelch);

// ---------------------------------------------------------------------------
// Significance matrix
// ---------------------------------------------------------------------------

enum class CellLabel { kMtlBetter, kStiltsBetter, kNotSignificant };
std::string_view to_string(CellLabel label);
CellLabel parse_cell_label(std::string_view text);

struct CellKey {
  std::string target;
  std::string support;

  auto operator<=>(const CellKey&) const = default;
  bool operator==(const CellKey&) const = default;
};

std::string to_string(const CellKey& key);  // "(target, support)"

struct Cell {
  double mtl_mean = 0.0;
  std::optional<double> mtl_std;
  double stilts_mean = 0.0;
  std::optional<double> stilts_std;
  double difference = 0.0;  // mtl_mean - stilts_mean
  CellLabel label = CellLabel::kNotSignificant;
  TestResult test;
};

/// Labels follow the embedded test: MTL_BETTER iff significant and
/// difference > 0, STILTS_BETTER iff significant and difference < 0.
CellLabel label_for(const TestResult& test, double difference);

struct SignificanceMatrix {
  std::vector<std::string> tasks;  // axis order, largest training set first
  std::map<CellKey, Cell> cells;
  double alpha = 0.1;
  TTestKind kind = TTestKind::kWelch;

  const Cell& at(const std::string& target, const std::string& support) const;
  std::size_t significant_count() const;
};

struct CellSamples {
  std::optional<std::vector<double>> mtl;
  std::optional<std::vector<double>> stilts;
};

/// Throws kIncompleteCell naming every cell that lacks a method sample, and
/// kValidation for diagonal cells or cells outside `task_order`.
SignificanceMatrix build_significance_matrix(const std::map<CellKey, CellSamples>& samples,
                                             std::vector<std::string> task_order,
                                             double alpha = 0.1,
                                             TTestKind kind = TTestKind::kWelch);

}  // namespace transel::stats
