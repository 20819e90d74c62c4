// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transel/data_pipeline.hpp"
#include "transel/scheduler.hpp"
#include "transel/training_engine.hpp"

namespace transel {

enum class Strategy { kStilts, kMtlPair, kMtlAll };
enum class Stage { kSupport, kTarget, kJoint };

std::string_view to_string(Strategy s);
std::string_view to_string(Stage s);
Strategy parse_strategy(std::string_view text);
Stage parse_stage(std::string_view text);

const std::vector<std::uint64_t>& default_seeds();  // {0, 1, 2, 3, 4}

inline constexpr std::string_view kAllTasks = "ALL";

struct CheckpointSummary {
  std::size_t step = 0;
  double epoch_position = 0.0;
  double selection_score = 0.0;
  std::string state_hash;

  bool operator==(const CheckpointSummary&) const = default;
};

/// One training run. STILTs runs come in SUPPORT/TARGET pairs linked by
/// parent_run_id; every MTL run is a single JOINT record.
struct RunRecord {
  std::string run_id;
  std::string experiment = "default";
  Strategy strategy = Strategy::kMtlPair;
  std::string target_task;  // the trained task for SUPPORT records; "ALL" for MTL_ALL
  std::vector<std::string> support_tasks;
  Stage stage = Stage::kJoint;
  std::uint64_t seed = 0;
  PolicyKind sampling_policy = PolicyKind::kDynamic;
  std::string config;  // backend + TrainConfig fingerprint
  double final_score = 0.0;                   // 0-100 scale
  std::map<std::string, double> task_scores;  // every trained task, 0-100
  std::vector<CheckpointSummary> checkpoint_history;
  std::size_t best_checkpoint = 0;
  double best_selection_score = 0.0;
  std::string best_state_hash;
  std::string parent_run_id;
  std::vector<SubsampleManifest> provenance;

  bool operator==(const RunRecord&) const = default;
};

/// Content hash of everything that defines a run (not its results). Equal
/// identities mean a re-execution would reproduce the same record.
std::string compute_run_id(const RunRecord& record);

struct RunContext {
  BackendFactory backend;
  std::string backend_name = "tiny";
  TrainConfig config;  // config.seed is replaced per run
  std::string experiment = "default";

  std::string config_fingerprint() const;
};

struct RunOutcome {
  RunRecord record;
  StateToken best_state;
};

/// Identity fields and run_id of the record run_single_task / run_joint
/// would produce, without training. Lets drivers skip stored runs.
RunRecord single_task_identity(const TaskData& task, std::uint64_t seed, const RunContext& ctx,
                               Stage stage, const RunRecord* parent = nullptr);
RunRecord joint_identity(const TaskSet& tasks, std::uint64_t seed, const RunContext& ctx,
                         const SamplingPolicy& policy, bool all_tasks);

/// Single-task training on `task`, optionally warm-started from a parent
/// STILTs support run.
RunOutcome run_single_task(const TaskData& task, std::uint64_t seed, const RunContext& ctx,
                           Stage stage, const RunRecord* parent = nullptr,
                           const StateToken* parent_state = nullptr);

/// Joint training. With two tasks (target first) this is pairwise MTL and
/// selection uses the target's dev metric; with three or more it is MTL_ALL
/// and selection uses the macro mean of normalized dev metrics.
RunOutcome run_joint(const TaskSet& tasks, std::uint64_t seed, const RunContext& ctx,
                     const SamplingPolicy& policy, bool all_tasks);

/// First record with the highest best_selection_score.
std::size_t best_support_index(const std::vector<RunRecord>& support_records);

struct SupportStage {
  std::vector<RunRecord> records;
  std::size_t best = 0;
  StateToken best_state;
};

SupportStage run_support_stage(const TaskData& support, const std::vector<std::uint64_t>& seeds,
                               const RunContext& ctx);

std::vector<RunRecord> run_target_stage(const TaskData& target, const RunRecord& parent,
                                        const StateToken& parent_state,
                                        const std::vector<std::uint64_t>& seeds,
                                        const RunContext& ctx);

/// Support stages keyed by support task and run configuration, so that one
/// set of support models serves every target.
class SupportStageCache {
 public:
  std::shared_ptr<const SupportStage> find(const std::string& key) const;
  void put(const std::string& key, std::shared_ptr<const SupportStage> stage);
  std::size_t size() const;

  static std::string key_for(const TaskData& support, const std::vector<std::uint64_t>& seeds,
                             const RunContext& ctx);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const SupportStage>> stages_;
};

/// Sequential transfer: |seeds| support runs, then |seeds| target runs
/// warm-started from the best support run. Returns support records followed
/// by target records. Cached support stages are returned again without
/// retraining.
std::vector<RunRecord> run_stilts(const TaskData& support, const TaskData& target,
                                  const std::vector<std::uint64_t>& seeds, const RunContext& ctx,
                                  SupportStageCache* cache = nullptr);

std::vector<RunRecord> run_mtl_pair(const TaskData& target, const TaskData& support,
                                    const std::vector<std::uint64_t>& seeds, const RunContext& ctx,
                                    SamplingPolicy policy = {PolicyKind::kDynamic});

std::vector<RunRecord> run_mtl_all(const TaskSet& tasks, const std::vector<std::uint64_t>& seeds,
                                   const RunContext& ctx,
                                   SamplingPolicy policy = {PolicyKind::kSize});

}  // namespace transel
