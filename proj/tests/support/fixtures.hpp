// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "transel/stats.hpp"

namespace transel::testing {

/// Reference rows of two GLUE comparison tables: name, mean as stated, and
/// per-task values in column order.
struct PrintedRow {
  std::string name;
  double mean;
  std::vector<double> values;
};

const std::vector<std::string>& printed_columns();  // WNLI ... CoLA
const std::vector<PrintedRow>& main_table_rows();
const std::vector<PrintedRow>& policy_table_rows();

/// Per-cell samples for the 9 GLUE tasks: 53 significant cells of which the
/// size rule gets 49 right. The misses are (MRPC, QQP), (MRPC, SST-2),
/// (MRPC, RTE) and (RTE, MNLI); every MNLI-row cell is STILTs-better.
std::map<stats::CellKey, stats::CellSamples> glue_heuristic_samples();
const std::vector<stats::CellKey>& glue_heuristic_misses();

}  // namespace transel::testing
