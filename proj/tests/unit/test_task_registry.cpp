// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include <gtest/gtest.h>

#include "transel/error.hpp"
#include "transel/task_registry.hpp"

namespace transel {
namespace {

TaskSpec binary_spec(std::string id, std::size_t n) {
  TaskSpec s;
  s.task_id = std::move(id);
  s.display_name = s.task_id;
  s.train_size = n;
  s.label_space = {"0", "1"};
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kValidation;
}

TEST(Registry, RegisterReturnsId) {
  Registry r;
  EXPECT_EQ(r.register_task(binary_spec("A", 10)), "A");
  EXPECT_EQ(r.size(), 1u);
  EXPECT_TRUE(r.contains("A"));
}

TEST(Registry, DuplicateIdRejected) {
  Registry r;
  r.register_task(binary_spec("A", 10));
  EXPECT_EQ(code_of([&] { r.register_task(binary_spec("A", 20)); }), ErrorCode::kDuplicateTask);
  EXPECT_EQ(r.size(), 1u);
}

TEST(Registry, UnknownIdRejected) {
  const Registry r = builtin_glue_registry();
  EXPECT_EQ(code_of([&] { training_size(r, "SQuAD"); }), ErrorCode::kUnknownTask);
}

TEST(Registry, BuiltinGlueSizes) {
  const Registry r = builtin_glue_registry();
  ASSERT_EQ(r.size(), 9u);
  const std::vector<std::pair<std::string, std::size_t>> expected = {
      {"MNLI", 392662}, {"QQP", 363846}, {"QNLI", 104743}, {"SST-2", 67349}, {"CoLA", 8551},
      {"STS-B", 5749},  {"MRPC", 3668},  {"RTE", 2490},    {"WNLI", 635}};
  for (const auto& [id, n] : expected) EXPECT_EQ(training_size(r, id), n) << id;
  std::vector<std::string> order;
  for (const auto& [id, _] : expected) order.push_back(id);
  EXPECT_EQ(r.ids(), order);
  EXPECT_EQ(r.ids_by_size_descending(), order);
  for (std::size_t i = 1; i < r.tasks().size(); ++i) {
    EXPECT_GT(r.tasks()[i - 1].train_size, r.tasks()[i].train_size);
  }
}

TEST(Registry, MetricNormalization) {
  EXPECT_DOUBLE_EQ(normalize_metric(MetricKind::kAccuracy, 0.8), 0.8);
  EXPECT_DOUBLE_EQ(normalize_metric(MetricKind::kMatthewsCorr, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(normalize_metric(MetricKind::kMatthewsCorr, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(normalize_metric(MetricKind::kPearsonSpearmanAvg, 1.0), 1.0);
}

TEST(Registry, SaveLoadRoundTrip) {
  const Registry r = builtin_glue_registry();
  const auto path = std::filesystem::temp_directory_path() / "transel_registry_roundtrip.jsonl";
  r.save(path);
  const Registry back = Registry::load(path);
  ASSERT_EQ(back.size(), r.size());
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(back.tasks()[i], r.tasks()[i]);
  std::filesystem::remove(path);
}

TEST(Registry, SetSizesUpdatesAttachedCounts) {
  Registry r;
  r.register_task(binary_spec("A", 10));
  r.set_sizes("A", 42, 7);
  EXPECT_EQ(training_size(r, "A"), 42u);
  EXPECT_EQ(r.get("A").dev_size, 7u);
}

}  // namespace
}  // namespace transel
