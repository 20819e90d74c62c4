// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "transel/error.hpp"
#include "transel/run_store.hpp"

namespace transel {
namespace {

namespace fs = std::filesystem;

class RunStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("transel_store_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  static RunRecord sample(std::uint64_t seed) {
    RunRecord r;
    r.experiment = "main";
    r.strategy = Strategy::kStilts;
    r.stage = Stage::kTarget;
    r.target_task = "RTE";
    r.support_tasks = {"MNLI"};
    r.seed = seed;
    r.config = "tiny|e=1";
    r.final_score = 66.25;
    r.task_scores = {{"RTE", 66.25}};
    r.checkpoint_history = {{1, 0.5, 0.6625, "00112233aabbccdd"}};
    r.best_selection_score = 0.6625;
    r.best_state_hash = "00112233aabbccdd";
    r.parent_run_id = "feedbeef00000000";
    r.provenance = {{"MNLI", SubsampleMode::kProportionOfTarget, 0.5, 3, 1000, 20}};
    r.run_id = compute_run_id(r);
    return r;
  }

  fs::path dir;
};

TEST_F(RunStoreTest, JsonLineRoundTrip) {
  const auto r = sample(3);
  const auto line = record_to_json_line(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(record_from_json_line(line), r);
  EXPECT_THROW(record_from_json_line("{\"run_id\":"), Error);
}

TEST_F(RunStoreTest, AppendSkipAndReload) {
  {
    RunStore store(dir);
    EXPECT_EQ(store.append(sample(0)), RunStore::AppendResult::kAppended);
    EXPECT_EQ(store.append(sample(1)), RunStore::AppendResult::kAppended);
    EXPECT_EQ(store.append(sample(0)), RunStore::AppendResult::kSkipped);
    EXPECT_EQ(store.size(), 2u);
  }
  RunStore reopened(dir);
  ASSERT_EQ(reopened.size(), 2u);
  EXPECT_EQ(reopened.records()[1], sample(1));
  EXPECT_TRUE(reopened.contains(sample(0).run_id));
  EXPECT_FALSE(reopened.find("nope").has_value());
}

TEST_F(RunStoreTest, ConflictingContentIsIntegrityError) {
  RunStore store(dir);
  store.append(sample(0));
  auto changed = sample(0);
  changed.final_score = 12.0;
  try {
    store.append(changed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
  }
}

TEST_F(RunStoreTest, TruncatedTrailingLineIsDropped) {
  {
    RunStore store(dir);
    store.append(sample(0));
  }
  const auto full = record_to_json_line(sample(1));
  {
    std::ofstream out(dir / "runs.jsonl", std::ios::app | std::ios::binary);
    out << full.substr(0, full.size() / 2);
  }
  RunStore reopened(dir);
  EXPECT_TRUE(reopened.dropped_partial_line());
  EXPECT_EQ(reopened.size(), 1u);
  EXPECT_EQ(reopened.append(sample(1)), RunStore::AppendResult::kAppended);
  RunStore again(dir);
  EXPECT_FALSE(again.dropped_partial_line());
  EXPECT_EQ(again.size(), 2u);
}

TEST_F(RunStoreTest, CorruptMiddleLineIsParseError) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "runs.jsonl");
    out << "garbage\n" << record_to_json_line(sample(0)) << "\n";
  }
  try {
    RunStore store(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST_F(RunStoreTest, BlobsAreContentAddressed) {
  RunStore store(dir);
  const StateToken token = {1, 2, 3, 250};
  store.put_blob(token);
  const auto hash = token_hash(token);
  EXPECT_EQ(store.get_blob(hash), token);
  EXPECT_FALSE(store.get_blob("0000000000000000").has_value());
  {
    std::ofstream out(dir / "blobs" / (hash + ".bin"), std::ios::binary | std::ios::trunc);
    out << "xx";
  }
  EXPECT_FALSE(store.get_blob(hash).has_value());
}

}  // namespace
}  // namespace transel
