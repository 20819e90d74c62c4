// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <algorithm>

#include "transel/task_registry.hpp"

namespace transel::testing {

const std::vector<std::string>& printed_columns() {
  static const std::vector<std::string> cols = {"WNLI", "STS-B", "SST-2", "RTE", "QQP",
                                                "QNLI", "MRPC",  "MNLI",  "CoLA"};
  return cols;
}

const std::vector<PrintedRow>& main_table_rows() {
  static const std::vector<PrintedRow> rows = {
      {"MTL_All", 73.3, {54.4, 86.6, 90.8, 67.4, 80.2, 84.9, 85.4, 74.2, 35.8}},
      {"Avg. STILTs", 75.8, {45.0, 87.5, 92.1, 61.9, 88.9, 89.4, 87.4, 84.0, 46.4}},
      {"Avg. MTL", 77.3, {56.1, 87.4, 91.9, 66.0, 85.6, 87.5, 87.4, 80.8, 52.7}},
      {"Avg. S.H.", 78.3, {56.1, 87.7, 92.3, 66.5, 89.0, 89.6, 87.3, 84.0, 52.1}},
      {"Pairwise Oracle", 80.7, {57.7, 88.8, 92.9, 76.0, 89.5, 90.6, 90.2, 84.3, 56.5}},
  };
  return rows;
}

const std::vector<PrintedRow>& policy_table_rows() {
  static const std::vector<PrintedRow> rows = [] {
    std::vector<PrintedRow> r = {
        {"MTL_All Uniform", 63.2, {56.1, 85.1, 84.0, 58.3, 70.4, 76.4, 80.3, 50.7, 7.8}},
        {"MTL_All Dynamic", 67.2, {52.1, 86.2, 88.4, 63.8, 75.5, 81.2, 82.3, 64.0, 10.9}},
        {"MTL_All Size", 73.3, {54.4, 86.6, 90.8, 67.4, 80.2, 84.9, 85.4, 74.2, 35.8}},
    };
    const auto& main = main_table_rows();
    r.insert(r.end(), main.begin() + 1, main.end());
    return r;
  }();
  return rows;
}

const std::vector<stats::CellKey>& glue_heuristic_misses() {
  static const std::vector<stats::CellKey> misses = {
      {"MRPC", "QQP"}, {"MRPC", "SST-2"}, {"MRPC", "RTE"}, {"RTE", "MNLI"}};
  return misses;
}

std::map<stats::CellKey, stats::CellSamples> glue_heuristic_samples() {
  const Registry glue = builtin_glue_registry();
  const auto tasks = glue.ids_by_size_descending();
  const auto& misses = glue_heuristic_misses();
  auto is_miss = [&](const stats::CellKey& k) { return std::find(misses.begin(), misses.end(), k) != misses.end(); };

  // Cells left non-significant: 19 of the 72, never in the MNLI row and never
  // a miss. (WNLI, STS-B) is among them.
  std::vector<stats::CellKey> not_significant = {{"WNLI", "STS-B"}};
  for (const auto& t : tasks) {
    if (t == "MNLI") continue;
    for (const auto& s : tasks) {
      if (t == s || not_significant.size() == 19) continue;
      const stats::CellKey k{t, s};
      if (is_miss(k) || k == not_significant.front()) continue;
      if (t == "WNLI" || t == "CoLA" || t == "SST-2") not_significant.push_back(k);
    }
  }

  const std::vector<double> jitter = {0.0, 0.4, -0.3, 0.2, -0.1};
  std::map<stats::CellKey, stats::CellSamples> samples;
  for (const auto& t : tasks) {
    for (const auto& s : tasks) {
      if (t == s) continue;
      const stats::CellKey key{t, s};
      std::vector<double> mtl(5), stilts(5);
      const bool ns = std::find(not_significant.begin(), not_significant.end(), key) != not_significant.end();
      const bool predicts_mtl = training_size(glue, s) > training_size(glue, t);
      const bool mtl_wins = is_miss(key) ? !predicts_mtl : predicts_mtl;
      for (std::size_t i = 0; i < 5; ++i) {
        const double base = 70.0 + jitter[i];
        if (ns) {
          mtl[i] = base;
          stilts[i] = 70.0 + jitter[(i + 2) % 5];
        } else {
          mtl[i] = base + (mtl_wins ? 5.0 : -5.0);
          stilts[i] = 70.0 + jitter[(i + 1) % 5];
        }
      }
      samples[key] = {mtl, stilts};
    }
  }
  return samples;
}

}  // namespace transel::testing
