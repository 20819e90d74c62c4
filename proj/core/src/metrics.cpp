// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "transel/error.hpp"

namespace transel::metrics {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kValidation, "prediction/gold length mismatch");
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double accuracy(std::span<const double> predicted, std::span<const double> gold) {
  check_lengths(predicted, gold);
  if (gold.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double f1_binary(std::span<const double> predicted, std::span<const double> gold) {
  check_lengths(predicted, gold);
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] == 1.0;
    const bool g = gold[i] == 1.0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  const double denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2 * tp / denom;
}

double matthews_corr(std::span<const double> predicted, std::span<const double> gold,
                     std::size_t class_count) {
  check_lengths(predicted, gold);
  const std::size_t k = std::max<std::size_t>(class_count, 2);
  std::vector<double> confusion(k * k, 0.0);  // row = gold, column = predicted
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = static_cast<std::size_t>(gold[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    require(g < k && p < k, ErrorCode::kValidation, "class index out of range");
    confusion[g * k + p] += 1.0;
  }
  std::vector<double> t(k, 0.0), p(k, 0.0);
  double c = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t q = 0; q < k; ++q) {
      t[r] += confusion[r * k + q];
      p[q] += confusion[r * k + q];
    }
    c += confusion[r * k + r];
  }
  const auto s = static_cast<double>(gold.size());
  const double pt = std::inner_product(p.begin(), p.end(), t.begin(), 0.0);
  const double pp = std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
  const double tt = std::inner_product(t.begin(), t.end(), t.begin(), 0.0);
  const double denom = std::sqrt((s * s - pp) * (s * s - tt));
  return denom == 0.0 ? 0.0 : (c * s - pt) / denom;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  if (x.size() < 2) return 0.0;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double denom = std::sqrt(sxx * syy);
  return denom == 0.0 ? 0.0 : sxy / denom;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double compute(MetricKind kind, std::span<const double> predicted, std::span<const double> gold,
               std::size_t class_count) {
  switch (kind) {
    case MetricKind::kAccuracy: return accuracy(predicted, gold);
    case MetricKind::kF1: return f1_binary(predicted, gold);
    case MetricKind::kMatthewsCorr: return matthews_corr(predicted, gold, class_count);
    case MetricKind::kPearsonSpearmanAvg:
      return 0.5 * (pearson(predicted, gold) + spearman(predicted, gold));
  }
  return 0.0;
}

}  // namespace transel::metrics
