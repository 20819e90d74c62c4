// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "transel/task_registry.hpp"

namespace transel::metrics {

// Class predictions and gold labels are class indices stored as doubles so
// that regression and classification share one evaluation signature.

double accuracy(std::span<const double> predicted, std::span<const double> gold);

// Binary F1 on the positive class (index 1).
double f1_binary(std::span<const double> predicted, std::span<const double> gold);

// Matthews correlation; the multiclass form (Gorodkin's R_K) reduces to the
// usual 2x2 formula for binary labels. A zero denominator yields 0.
double matthews_corr(std::span<const double> predicted, std::span<const double> gold,
                     std::size_t class_count);

double pearson(std::span<const double> x, std::span<const double> y);
// Pearson over average ranks, so ties are handled.
double spearman(std::span<const double> x, std::span<const double> y);

double compute(MetricKind kind, std::span<const double> predicted, std::span<const double> gold,
               std::size_t class_count);

}  // namespace transel::metrics
