// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/strategies.hpp"

#include <cstdio>
#include <set>

#include "transel/error.hpp"
#include "transel/rng.hpp"

namespace transel {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kStilts: return "STILTS";
    case Strategy::kMtlPair: return "MTL_PAIR";
    case Strategy::kMtlAll: return "MTL_ALL";
  }
  return "MTL_PAIR";
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kSupport: return "SUPPORT";
    case Stage::kTarget: return "TARGET";
    case Stage::kJoint: return "JOINT";
  }
  return "JOINT";
}

Strategy parse_strategy(std::string_view text) {
  for (auto s : {Strategy::kStilts, Strategy::kMtlPair, Strategy::kMtlAll}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::kParse, "unknown strategy '" + std::string(text) + "'");
}

Stage parse_stage(std::string_view text) {
  for (auto s : {Stage::kSupport, Stage::kTarget, Stage::kJoint}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::kParse, "unknown stage '" + std::string(text) + "'");
}

const std::vector<std::uint64_t>& default_seeds() {
  static const std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  return seeds;
}

std::string compute_run_id(const RunRecord& r) {
  std::string identity = "run/v1|" + r.experiment + "|" + std::string(to_string(r.strategy)) + "|" +
                         std::string(to_string(r.stage)) + "|" + r.target_task + "|";
  for (const auto& s : r.support_tasks) identity += s + ",";
  identity += "|" + std::to_string(r.seed) + "|" + std::string(to_string(r.sampling_policy)) + "|" +
              r.config + "|" + r.parent_run_id + "|";
  for (const auto& m : r.provenance) identity += m.to_line() + ";";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(identity)));
  return buf;
}

std::string RunContext::config_fingerprint() const {
  return "backend=" + backend_name + ";" + config.fingerprint();
}

namespace {

void fill_from_training(RunRecord& rec, const TrainResult& result) {
  rec.checkpoint_history.clear();
  for (const auto& c : result.history) {
    rec.checkpoint_history.push_back({c.step, c.epoch_position, c.selection_score, c.state_hash});
  }
  rec.best_checkpoint = result.best_index;
  rec.best_selection_score = result.best().selection_score;
  rec.best_state_hash = result.best().state_hash;
}

std::unique_ptr<Trainable> make_backend(const RunContext& ctx) {
  require(static_cast<bool>(ctx.backend), ErrorCode::kValidation, "no backend factory");
  auto backend = ctx.backend();
  require(backend != nullptr, ErrorCode::kValidation, "backend factory returned null");
  return backend;
}

}  // namespace

RunRecord single_task_identity(const TaskData& task, std::uint64_t seed, const RunContext& ctx,
                               Stage stage, const RunRecord* parent) {
  require(stage != Stage::kJoint, ErrorCode::kValidation, "single-task runs are SUPPORT or TARGET");
  require((stage == Stage::kTarget) == (parent != nullptr), ErrorCode::kValidation,
          "TARGET runs need a parent support run");
  RunRecord rec;
  rec.experiment = ctx.experiment;
  rec.strategy = Strategy::kStilts;
  rec.stage = stage;
  rec.target_task = task.spec.task_id;
  rec.seed = seed;
  rec.sampling_policy = PolicyKind::kUniform;
  rec.config = ctx.config_fingerprint();
  if (parent) {
    require(parent->stage == Stage::kSupport, ErrorCode::kValidation, "parent must be a SUPPORT run");
    require(parent->target_task != task.spec.task_id, ErrorCode::kValidation,
            "support and target must differ");
    rec.support_tasks = {parent->target_task};
    rec.parent_run_id = parent->run_id;
    rec.provenance = parent->provenance;
  }
  rec.provenance.insert(rec.provenance.end(), task.manifests.begin(), task.manifests.end());
  rec.run_id = compute_run_id(rec);
  return rec;
}

RunOutcome run_single_task(const TaskData& task, std::uint64_t seed, const RunContext& ctx,
                           Stage stage, const RunRecord* parent, const StateToken* parent_state) {
  require((parent == nullptr) == (parent_state == nullptr), ErrorCode::kValidation,
          "a parent run and its state go together");
  RunRecord rec = single_task_identity(task, seed, ctx, stage, parent);

  auto backend = make_backend(ctx);
  backend->init(seed, ctx.config.learning_rate);
  if (parent_state) backend->restore(*parent_state);
  backend->add_task(task.spec);

  PolicyScheduleSource source({PolicyKind::kUniform}, {{task.spec.task_id, task.train.size()}},
                              ctx.config.batch_size, mix_seed(seed, "schedule:" + rec.run_id));
  TrainConfig config = ctx.config;
  config.seed = seed;
  const TaskSet tasks{&task};
  TrainResult result = train(*backend, source, tasks, config, SelectionRule::single(task.spec.task_id));

  fill_from_training(rec, result);
  rec.final_score = evaluate_final(*backend, task);
  rec.task_scores[task.spec.task_id] = rec.final_score;
  return {std::move(rec), std::move(result.best_state)};
}

RunRecord joint_identity(const TaskSet& tasks, std::uint64_t seed, const RunContext& ctx,
                         const SamplingPolicy& policy, bool all_tasks) {
  policy.validate();
  std::set<std::string> ids;
  for (const auto* t : tasks) ids.insert(t->spec.task_id);
  require(ids.size() == tasks.size(), ErrorCode::kValidation, "tasks must be distinct");
  if (all_tasks) {
    require(tasks.size() >= 3, ErrorCode::kValidation, "MTL_ALL needs at least three tasks");
  } else {
    require(tasks.size() == 2, ErrorCode::kValidation, "pairwise MTL needs exactly two tasks");
  }

  RunRecord rec;
  rec.experiment = ctx.experiment;
  rec.strategy = all_tasks ? Strategy::kMtlAll : Strategy::kMtlPair;
  rec.stage = Stage::kJoint;
  rec.target_task = all_tasks ? std::string(kAllTasks) : tasks[0]->spec.task_id;
  for (std::size_t i = all_tasks ? 0 : 1; i < tasks.size(); ++i) {
    rec.support_tasks.push_back(tasks[i]->spec.task_id);
  }
  rec.seed = seed;
  rec.sampling_policy = policy.kind;
  rec.config = ctx.config_fingerprint();
  for (const auto* t : tasks) rec.provenance.insert(rec.provenance.end(), t->manifests.begin(), t->manifests.end());
  rec.run_id = compute_run_id(rec);
  return rec;
}

RunOutcome run_joint(const TaskSet& tasks, std::uint64_t seed, const RunContext& ctx,
                     const SamplingPolicy& policy, bool all_tasks) {
  RunRecord rec = joint_identity(tasks, seed, ctx, policy, all_tasks);

  auto backend = make_backend(ctx);
  backend->init(seed, ctx.config.learning_rate);
  for (const auto* t : tasks) backend->add_task(t->spec);

  PolicyScheduleSource source(policy, train_sizes(tasks), ctx.config.batch_size,
                              mix_seed(seed, "schedule:" + rec.run_id));
  TrainConfig config = ctx.config;
  config.seed = seed;
  const SelectionRule rule =
      all_tasks ? SelectionRule::macro_mean() : SelectionRule::single(tasks[0]->spec.task_id);
  TrainResult result = train(*backend, source, tasks, config, rule);

  fill_from_training(rec, result);
  double sum = 0.0;
  for (const auto* t : tasks) {
    const double s = evaluate_final(*backend, *t);
    rec.task_scores[t->spec.task_id] = s;
    sum += s;
  }
  rec.final_score = all_tasks ? sum / static_cast<double>(tasks.size())
                              : rec.task_scores.at(tasks[0]->spec.task_id);
  return {std::move(rec), std::move(result.best_state)};
}

std::size_t best_support_index(const std::vector<RunRecord>& support_records) {
  require(!support_records.empty(), ErrorCode::kValidation, "no support runs");
  std::size_t best = 0;
  for (std::size_t i = 1; i < support_records.size(); ++i) {
    if (support_records[i].best_selection_score > support_records[best].best_selection_score) best = i;
  }
  return best;
}

SupportStage run_support_stage(const TaskData& support, const std::vector<std::uint64_t>& seeds,
                               const RunContext& ctx) {
  require(!seeds.empty(), ErrorCode::kValidation, "at least one seed is required");
  SupportStage stage;
  std::vector<StateToken> states;
  for (auto seed : seeds) {
    auto outcome = run_single_task(support, seed, ctx, Stage::kSupport);
    stage.records.push_back(std::move(outcome.record));
    states.push_back(std::move(outcome.best_state));
  }
  stage.best = best_support_index(stage.records);
  stage.best_state = std::move(states[stage.best]);
  return stage;
}

std::vector<RunRecord> run_target_stage(const TaskData& target, const RunRecord& parent,
                                        const StateToken& parent_state,
                                        const std::vector<std::uint64_t>& seeds,
                                        const RunContext& ctx) {
  require(!seeds.empty(), ErrorCode::kValidation, "at least one seed is required");
  require(parent.stage == Stage::kSupport, ErrorCode::kValidation, "parent must be a SUPPORT run");
  std::vector<RunRecord> out;
  for (auto seed : seeds) {
    out.push_back(run_single_task(target, seed, ctx, Stage::kTarget, &parent, &parent_state).record);
  }
  return out;
}

std::shared_ptr<const SupportStage> SupportStageCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = stages_.find(key);
  return it == stages_.end() ? nullptr : it->second;
}

void SupportStageCache::put(const std::string& key, std::shared_ptr<const SupportStage> stage) {
  std::lock_guard lock(mutex_);
  stages_.emplace(key, std::move(stage));
}

std::size_t SupportStageCache::size() const {
  std::lock_guard lock(mutex_);
  return stages_.size();
}

std::string SupportStageCache::key_for(const TaskData& support,
                                       const std::vector<std::uint64_t>& seeds,
                                       const RunContext& ctx) {
  std::string key = ctx.experiment + "|" + support.spec.task_id + "|" + ctx.config_fingerprint() + "|";
  for (auto s : seeds) key += std::to_string(s) + ",";
  for (const auto& m : support.manifests) key += "|" + m.to_line();
  return key;
}

std::vector<RunRecord> run_stilts(const TaskData& support, const TaskData& target,
                                  const std::vector<std::uint64_t>& seeds, const RunContext& ctx,
                                  SupportStageCache* cache) {
  require(support.spec.task_id != target.spec.task_id, ErrorCode::kValidation,
          "support and target must differ");
  require(!seeds.empty(), ErrorCode::kValidation, "at least one seed is required");

  std::shared_ptr<const SupportStage> stage;
  const std::string key = SupportStageCache::key_for(support, seeds, ctx);
  if (cache) stage = cache->find(key);
  if (!stage) {
    stage = std::make_shared<const SupportStage>(run_support_stage(support, seeds, ctx));
    if (cache) cache->put(key, stage);
  }

  std::vector<RunRecord> out = stage->records;
  auto targets = run_target_stage(target, stage->records[stage->best], stage->best_state, seeds, ctx);
  out.insert(out.end(), std::make_move_iterator(targets.begin()), std::make_move_iterator(targets.end()));
  return out;
}

std::vector<RunRecord> run_mtl_pair(const TaskData& target, const TaskData& support,
                                    const std::vector<std::uint64_t>& seeds, const RunContext& ctx,
                                    SamplingPolicy policy) {
  require(target.spec.task_id != support.spec.task_id, ErrorCode::kValidation,
          "support and target must differ");
  require(!seeds.empty(), ErrorCode::kValidation, "at least one seed is required");
  std::vector<RunRecord> out;
  const TaskSet tasks{&target, &support};
  for (auto seed : seeds) out.push_back(run_joint(tasks, seed, ctx, policy, false).record);
  return out;
}

std::vector<RunRecord> run_mtl_all(const TaskSet& tasks, const std::vector<std::uint64_t>& seeds,
                                   const RunContext& ctx, SamplingPolicy policy) {
  require(tasks.size() >= 3, ErrorCode::kValidation, "MTL_ALL needs at least three tasks");
  require(!seeds.empty(), ErrorCode::kValidation, "at least one seed is required");
  std::vector<RunRecord> out;
  for (auto seed : seeds) out.push_back(run_joint(tasks, seed, ctx, policy, true).record);
  return out;
}

}  // namespace transel
