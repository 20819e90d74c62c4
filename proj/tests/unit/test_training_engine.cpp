// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <set>

#include <gtest/gtest.h>

#include "transel/data_pipeline.hpp"
#include "transel/error.hpp"
#include "transel/tiny_backend.hpp"
#include "transel/training_engine.hpp"

namespace transel {
namespace {

// Backend whose dev metric after k steps is script[k % script.size()]. Its
// state is the step counter.
class ScriptedBackend final : public Trainable {
 public:
  explicit ScriptedBackend(std::vector<double> script, std::size_t fail_at = SIZE_MAX)
      : script_(std::move(script)), fail_at_(fail_at) {}

  std::string name() const override { return "scripted"; }
  void init(std::uint64_t, double) override { steps_ = 0; }
  void add_task(const TaskSpec&) override {}
  double train_step(const std::string&, std::span<const Example* const>) override {
    if (steps_ == fail_at_) throw std::runtime_error("boom");
    ++steps_;
    return 0.0;
  }
  double evaluate(const TaskSpec&, const SplitData&) override { return script_[evals_++ % script_.size()]; }
  StateToken snapshot() const override {
    StateToken t(sizeof steps_);
    std::memcpy(t.data(), &steps_, sizeof steps_);
    return t;
  }
  void restore(const StateToken& t) override { std::memcpy(&steps_, t.data(), sizeof steps_); }

  std::size_t steps() const { return steps_; }

 private:
  std::vector<double> script_;
  std::size_t fail_at_;
  std::size_t steps_ = 0;
  std::size_t evals_ = 0;
};

TaskData small_task(std::string id, std::size_t n_train = 64, std::uint64_t seed = 1) {
  auto t = make_synthetic_task(std::move(id), n_train, 40, 8, 2, 0.0, seed);
  return {t.spec, t.train, t.dev, {}};
}

TEST(TrainConfig, CheckpointCounts) {
  EXPECT_EQ(TrainConfig{}.checkpoint_count(), 20u);
  TrainConfig one;
  one.epochs = 1;
  one.checkpoint_interval = 1.0;
  EXPECT_EQ(one.checkpoint_count(), 1u);
  TrainConfig odd;
  odd.epochs = 3;
  odd.checkpoint_interval = 0.7;
  EXPECT_EQ(odd.checkpoint_count(), 4u);
  TrainConfig bad;
  bad.checkpoint_interval = 11;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(SelectBest, FirstArgmax) {
  std::vector<CheckpointRecord> h(4);
  const double scores[] = {0.3, 0.9, 0.7, 0.9};
  for (int i = 0; i < 4; ++i) h[i].selection_score = scores[i];
  EXPECT_EQ(select_best(std::span<const CheckpointRecord>(h.data(), 3)), 1u);
  EXPECT_EQ(select_best(h), 1u);
}

TEST(Train, RecordsEveryCheckpointAndRestoresBest) {
  const TaskData task = small_task("A");
  ScriptedBackend backend({0.3, 0.9, 0.7, 0.5});
  PolicyScheduleSource src({PolicyKind::kUniform}, {{"A", task.train.size()}}, 8, 0);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.checkpoint_interval = 0.5;
  const auto result = train(backend, src, {&task}, cfg, SelectionRule::single("A"));
  ASSERT_EQ(result.history.size(), 4u);
  EXPECT_EQ(result.best_index, 1u);
  for (const auto& c : result.history) EXPECT_LE(c.selection_score, result.best().selection_score);
  EXPECT_EQ(result.history[1].step, 8u);  // 64 examples / 8 = 8 steps per epoch
  EXPECT_DOUBLE_EQ(result.history[1].epoch_position, 1.0);
  EXPECT_EQ(backend.steps(), 8u);  // restored, not the last state (16)
}

TEST(Train, BackendFailureCarriesStep) {
  const TaskData task = small_task("A");
  ScriptedBackend backend({0.5}, 5);
  PolicyScheduleSource src({PolicyKind::kUniform}, {{"A", task.train.size()}}, 8, 0);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  try {
    train(backend, src, {&task}, cfg, SelectionRule::single("A"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRun);
    EXPECT_NE(std::string(e.what()).find("step 5"), std::string::npos) << e.what();
  }
}

TEST(Train, MacroMeanSelectionUsesNormalizedMetrics) {
  EXPECT_DOUBLE_EQ(SelectionRule::macro_mean().score({{"A", 0.5}, {"B", 1.0}}), 0.75);
  EXPECT_DOUBLE_EQ(SelectionRule::single("B").score({{"A", 0.5}, {"B", 1.0}}), 1.0);
}

TEST(EvaluateFinal, ScaledByHundred) {
  const TaskData task = small_task("A");
  ScriptedBackend perfect({1.0});
  EXPECT_DOUBLE_EQ(evaluate_final(perfect, task), 100.0);
  ScriptedBackend wrong({0.0});
  EXPECT_DOUBLE_EQ(evaluate_final(wrong, task), 0.0);
  TaskData no_dev = task;
  no_dev.dev.examples.clear();
  EXPECT_THROW(evaluate_final(perfect, no_dev), Error);
}

TEST(TinyBackend, SnapshotRestoreRoundTrip) {
  const TaskData task = small_task("A", 200);
  TinyBackend b;
  b.init(3, 0.1);
  b.add_task(task.spec);
  std::vector<const Example*> batch;
  for (std::size_t i = 0; i < 16; ++i) batch.push_back(&task.train.examples[i]);
  b.train_step("A", batch);
  const auto token = b.snapshot();
  const double before = b.evaluate(task.spec, task.dev);
  b.train_step("A", batch);
  b.restore(token);
  EXPECT_EQ(b.evaluate(task.spec, task.dev), before);
  EXPECT_EQ(b.snapshot(), token);
  StateToken broken = token;
  broken.push_back(0);
  EXPECT_THROW(b.restore(broken), Error);
}

TEST(TinyBackend, SyntheticFeaturesDoNotCollide) {
  TinyBackend b;
  Example ex{0, "", std::nullopt, 0};
  for (int j = 0; j < 32; ++j) ex.text_a += (j ? " f" : "f") + std::to_string(j) + ":1.0";
  std::set<std::uint32_t> buckets;
  for (const auto& [bucket, _] : b.featurize(ex)) buckets.insert(bucket);
  EXPECT_EQ(buckets.size(), 32u);
}

TEST(TinyBackend, DeterministicTrainingAndLearning) {
  const TaskData task = small_task("A", 600, 4);
  auto run = [&] {
    TinyBackend b;
    b.init(11, 0.1);
    b.add_task(task.spec);
    PolicyScheduleSource src({PolicyKind::kUniform}, {{"A", task.train.size()}}, 16, 11);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.1;
    auto r = train(b, src, {&task}, cfg, SelectionRule::single("A"));
    return std::make_pair(r.history.size(), evaluate_final(b, task));
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.first, 6u);
  EXPECT_GE(a.second, 95.0);  // noiseless, separable
}

TEST(TokenHash, SixteenHexDigits) {
  const auto h = token_hash(StateToken{1, 2, 3});
  EXPECT_EQ(h.size(), 16u);
  EXPECT_NE(h, token_hash(StateToken{1, 2, 4}));
}

}  // namespace
}  // namespace transel
