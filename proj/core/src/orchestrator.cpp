// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/orchestrator.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "transel/error.hpp"

namespace transel {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Task data
// ---------------------------------------------------------------------------

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  require(parts.size() >= 2 && parts.size() <= 5 && !parts[0].empty(), ErrorCode::kValidation,
          "synthetic task '" + text + "' is not name:n_train[:n_dev[:classes[:noise]]]");
  SyntheticSpec spec;
  spec.task_id = parts[0];
  try {
    spec.n_train = std::stoul(parts[1]);
    spec.n_dev = parts.size() > 2 ? std::stoul(parts[2]) : std::max<std::size_t>(1, spec.n_train / 5);
    if (parts.size() > 3) spec.class_count = std::stoul(parts[3]);
    if (parts.size() > 4) spec.noise = std::stod(parts[4]);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kValidation, "synthetic task '" + text + "' has a non-numeric field");
  }
  return spec;
}

TaskData synthetic_task_data(const SyntheticSpec& spec, std::uint64_t data_seed) {
  auto task = make_synthetic_task(spec.task_id, spec.n_train, spec.n_dev, spec.n_features,
                                  spec.class_count, spec.noise, data_seed);
  return TaskData{std::move(task.spec), std::move(task.train), std::move(task.dev), {}};
}

TaskData load_task_data(const TaskSpec& spec, const std::filesystem::path& dir) {
  std::string ext;
  switch (spec.data_format) {
    case DataFormat::kTsv: ext = ".tsv"; break;
    case DataFormat::kJsonl: ext = ".jsonl"; break;
    case DataFormat::kSynthetic:
      throw Error(ErrorCode::kValidation, "task " + spec.task_id + " is synthetic and has no files");
  }
  const auto base = dir / spec.task_id;
  TaskData data{spec, load_split(base / ("train" + ext), spec, Split::kTrain),
                load_split(base / ("dev" + ext), spec, Split::kDev), {}};
  data.spec.train_size = data.train.size();
  data.spec.dev_size = data.dev.size();
  return data;
}

namespace {

std::filesystem::path sizes_path(const RunStore& store) { return store.dir() / "tasks.jsonl"; }

}  // namespace

TaskSizes load_task_sizes(const RunStore& store) {
  TaskSizes sizes;
  std::ifstream in(sizes_path(store));
  if (!in) return sizes;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      sizes[j.at("task_id").get<std::string>()] = j.at("train_size").get<std::size_t>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  sizes_path(store).string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return sizes;
}

void record_task_sizes(const RunStore& store, const TaskCatalog& catalog) {
  TaskSizes sizes = load_task_sizes(store);
  bool changed = false;
  for (const auto& [id, data] : catalog) {
    auto it = sizes.find(id);
    if (it == sizes.end()) {
      sizes[id] = data.train.size();
      changed = true;
    } else {
      require(it->second == data.train.size(), ErrorCode::kIntegrity,
              "task " + id + " was stored with " + std::to_string(it->second) +
                  " training examples, now has " + std::to_string(data.train.size()));
    }
  }
  if (!changed) return;
  const auto path = sizes_path(store);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + tmp);
    for (const auto& [id, n] : sizes) out << json{{"task_id", id}, {"train_size", n}}.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::kPair: return "PAIR";
    case PlanKind::kMatrix: return "MATRIX";
    case PlanKind::kSizeSweep: return "SIZE_SWEEP";
    case PlanKind::kMtlAll: return "MTL_ALL";
  }
  return "MATRIX";
}

void ExperimentPlan::validate() const {
  config.validate();
  policy.validate();
  require(!seeds.empty(), ErrorCode::kValidation, "at least one seed is required");
  require(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size(),
          ErrorCode::kValidation, "seeds must be distinct");
  require(!experiment.empty(), ErrorCode::kValidation, "experiment name is empty");
  const std::set<std::string> distinct(tasks.begin(), tasks.end());
  switch (kind) {
    case PlanKind::kMatrix:
      require(tasks.size() >= 2, ErrorCode::kValidation, "a matrix needs at least two tasks");
      require(distinct.size() == tasks.size(), ErrorCode::kValidation, "tasks must be distinct");
      break;
    case PlanKind::kMtlAll:
      require(tasks.size() >= 3, ErrorCode::kValidation, "MTL_ALL needs at least three tasks");
      require(distinct.size() == tasks.size(), ErrorCode::kValidation, "tasks must be distinct");
      break;
    case PlanKind::kPair:
    case PlanKind::kSizeSweep:
      require(!target.empty() && !support.empty(), ErrorCode::kValidation,
              "exactly one (target, support) pair is required");
      require(target != support, ErrorCode::kValidation, "support and target must differ");
      break;
  }
  if (kind == PlanKind::kSizeSweep) {
    require(sweep.has_value(), ErrorCode::kValidation, "a size sweep needs sweep options");
    require(sweep->target_fraction == 1.0 || sweep->target_fraction == 0.5, ErrorCode::kValidation,
            "target fraction must be 1.0 or 0.5");
    require(!sweep->proportions.empty(), ErrorCode::kValidation, "at least one proportion is required");
    for (std::size_t i = 0; i < sweep->proportions.size(); ++i) {
      require(sweep->proportions[i] > 0.0, ErrorCode::kValidation, "proportions must be positive");
      require(i == 0 || sweep->proportions[i] > sweep->proportions[i - 1], ErrorCode::kValidation,
              "proportions must be strictly ascending");
    }
  }
}

JobCounts enumerate(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t s = plan.seeds.size();
  JobCounts c;
  switch (plan.kind) {
    case PlanKind::kPair:
      c.mtl_pair = s;
      c.stilts_support = s;
      c.stilts_target = s;
      break;
    case PlanKind::kMatrix: {
      const std::size_t n = plan.tasks.size();
      c.mtl_pair = n * (n - 1) * s;
      c.stilts_support = n * s;
      c.stilts_target = n * (n - 1) * s;
      break;
    }
    case PlanKind::kSizeSweep: {
      const std::size_t k = plan.sweep->proportions.size();
      c.mtl_pair = k * s;
      c.stilts_support = k * s;
      c.stilts_target = k * s;
      break;
    }
    case PlanKind::kMtlAll:
      c.mtl_all = s;
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace {

/// Jobs with dependencies, run by a fixed number of workers in FIFO order of
/// readiness. The first failure stops dispatch and is rethrown.
class JobGraph {
 public:
  std::size_t add(std::string name, std::function<void()> fn, const std::vector<std::size_t>& deps = {}) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({std::move(name), std::move(fn), {}, deps.size()});
    for (auto d : deps) nodes_.at(d).dependents.push_back(id);
    return id;
  }

  std::size_t size() const { return nodes_.size(); }

  void run(std::size_t workers) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].pending == 0) ready_.push_back(i);
    }
    workers = std::max<std::size_t>(1, std::min(workers, nodes_.size()));
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < workers; ++i) pool.emplace_back([this] { work(); });
      for (auto& t : pool) t.join();
    }
    if (error_) std::rethrow_exception(error_);
  }

 private:
  struct Node {
    std::string name;
    std::function<void()> fn;
    std::vector<std::size_t> dependents;
    std::size_t pending = 0;
  };

  void work() {
    std::unique_lock lock(mutex_);
    for (;;) {
      cv_.wait(lock, [&] { return !ready_.empty() || finished_ == nodes_.size() || error_; });
      if (error_ || ready_.empty()) {
        cv_.notify_all();
        return;
      }
      const std::size_t id = ready_.front();
      ready_.pop_front();
      lock.unlock();
      std::exception_ptr failure;
      try {
        nodes_[id].fn();
      } catch (const Error& e) {
        failure = std::make_exception_ptr(
            Error(e.code(), nodes_[id].name + ": " + std::string(e.what())));
      } catch (const std::exception& e) {
        failure = std::make_exception_ptr(Error(ErrorCode::kRun, nodes_[id].name + ": " + e.what()));
      }
      lock.lock();
      ++finished_;
      if (failure && !error_) error_ = failure;
      if (!error_) {
        for (auto d : nodes_[id].dependents) {
          if (--nodes_[d].pending == 0) ready_.push_back(d);
        }
      }
      cv_.notify_all();
    }
  }

  std::vector<Node> nodes_;
  std::deque<std::size_t> ready_;
  std::size_t finished_ = 0;
  std::exception_ptr error_;
  std::mutex mutex_;
  std::condition_variable cv_;
};

struct SupportSlot {
  const TaskData* support = nullptr;
  std::vector<RunRecord> identities;  // one per seed
  std::mutex mutex;
  std::optional<RunRecord> parent;     // argmax, set by the resolve job
  std::optional<StateToken> state;     // loaded lazily
};

std::string job_name(const RunRecord& id) {
  std::string name = std::string(to_string(id.strategy)) + "/" + std::string(to_string(id.stage)) + " " +
                     id.target_task;
  if (!id.support_tasks.empty()) {
    name += " <-";
    for (const auto& s : id.support_tasks) name += " " + s;
  }
  return name + " seed=" + std::to_string(id.seed);
}

class Driver {
 public:
  Driver(const ExperimentPlan& plan, RunStore& store, const RunOptions& options)
      : plan_(plan), store_(store), options_(options) {
    ctx_.backend = options.backend;
    ctx_.backend_name = options.backend_name;
    ctx_.config = plan.config;
    ctx_.experiment = plan.experiment;
  }

  void mtl_pair(const TaskData& target, const TaskData& support) {
    const TaskSet tasks{&target, &support};
    for (auto seed : plan_.seeds) {
      RunRecord id = joint_identity(tasks, seed, ctx_, plan_.policy, false);
      if (skip_if_stored(id)) continue;
      graph_.add(job_name(id), [this, tasks, seed, id] {
        auto outcome = run_joint(tasks, seed, ctx_, plan_.policy, false);
        commit(id, outcome.record);
      });
    }
  }

  void mtl_all(const TaskSet& tasks) {
    for (auto seed : plan_.seeds) {
      RunRecord id = joint_identity(tasks, seed, ctx_, plan_.policy, true);
      if (skip_if_stored(id)) continue;
      graph_.add(job_name(id), [this, tasks, seed, id] {
        auto outcome = run_joint(tasks, seed, ctx_, plan_.policy, true);
        commit(id, outcome.record);
      });
    }
  }

  /// Support runs for every seed plus a resolve job that picks the argmax
  /// once all of them are stored. Returns the resolve job id.
  std::pair<std::shared_ptr<SupportSlot>, std::size_t> stilts_support(const TaskData& support) {
    auto slot = std::make_shared<SupportSlot>();
    slot->support = &support;
    std::vector<std::size_t> deps;
    for (auto seed : plan_.seeds) {
      RunRecord id = single_task_identity(support, seed, ctx_, Stage::kSupport);
      slot->identities.push_back(id);
      if (skip_if_stored(id)) continue;
      deps.push_back(graph_.add(job_name(id), [this, &support, seed, id] {
        auto outcome = run_single_task(support, seed, ctx_, Stage::kSupport);
        store_.put_blob(outcome.best_state);
        commit(id, outcome.record);
      }));
    }
    const std::size_t resolve = graph_.add("resolve support " + support.spec.task_id, [this, slot] {
      std::vector<RunRecord> stored;
      for (const auto& id : slot->identities) {
        auto rec = store_.find(id.run_id);
        require(rec.has_value(), ErrorCode::kRun, "support run " + id.run_id + " is not stored");
        stored.push_back(std::move(*rec));
      }
      std::lock_guard lock(slot->mutex);
      slot->parent = stored[best_support_index(stored)];
    }, deps);
    return {slot, resolve};
  }

  void stilts_targets(const std::shared_ptr<SupportSlot>& slot, std::size_t resolve, const TaskData& target) {
    for (auto seed : plan_.seeds) {
      graph_.add("STILTS/TARGET " + target.spec.task_id + " <- " + slot->support->spec.task_id +
                     " seed=" + std::to_string(seed),
                 [this, slot, &target, seed] {
                   RunRecord parent;
                   {
                     std::lock_guard lock(slot->mutex);
                     parent = *slot->parent;
                   }
                   RunRecord id = single_task_identity(target, seed, ctx_, Stage::kTarget, &parent);
                   if (skip_if_stored(id)) return;
                   const StateToken& state = parent_state(*slot);
                   auto outcome = run_single_task(target, seed, ctx_, Stage::kTarget, &parent, &state);
                   commit(id, outcome.record);
                 },
                 {resolve});
    }
  }

  const TaskData& own(TaskData data) {
    owned_.push_back(std::make_unique<TaskData>(std::move(data)));
    return *owned_.back();
  }

  ExecutionReport run() {
    total_ = graph_.size();
    graph_.run(options_.jobs);
    return report_;
  }

 private:
  bool skip_if_stored(const RunRecord& id) {
    if (!store_.contains(id.run_id)) return false;
    std::lock_guard lock(report_mutex_);
    ++report_.skipped;
    return true;
  }

  void commit(const RunRecord& identity, const RunRecord& record) {
    require(record.run_id == identity.run_id, ErrorCode::kIntegrity,
            "run id changed between planning and execution for " + job_name(identity));
    const auto result = store_.append(record);
    std::lock_guard lock(report_mutex_);
    if (result == RunStore::AppendResult::kAppended) {
      ++report_.appended;
    } else {
      ++report_.skipped;
    }
    if (options_.log) {
      char score[32];
      std::snprintf(score, sizeof score, "%.2f", record.final_score);
      options_.log("stored " + job_name(record) + " score=" + score + " id=" + record.run_id);
    }
  }

  // The argmax checkpoint, from the blob store or by re-running the
  // (deterministic) support run when the blob is gone.
  const StateToken& parent_state(SupportSlot& slot) {
    std::lock_guard lock(slot.mutex);
    if (slot.state) return *slot.state;
    const RunRecord& parent = *slot.parent;
    if (auto blob = store_.get_blob(parent.best_state_hash)) {
      slot.state = std::move(*blob);
      return *slot.state;
    }
    auto outcome = run_single_task(*slot.support, parent.seed, ctx_, Stage::kSupport);
    require(outcome.record == parent, ErrorCode::kIntegrity,
            "support run " + parent.run_id + " did not reproduce its stored record");
    store_.put_blob(outcome.best_state);
    slot.state = std::move(outcome.best_state);
    return *slot.state;
  }

  const ExperimentPlan& plan_;
  RunStore& store_;
  const RunOptions& options_;
  RunContext ctx_;
  JobGraph graph_;
  std::vector<std::unique_ptr<TaskData>> owned_;
  std::mutex report_mutex_;
  ExecutionReport report_;
  std::size_t total_ = 0;
};

const TaskData& catalog_task(const TaskCatalog& catalog, const std::string& id) {
  auto it = catalog.find(id);
  require(it != catalog.end(), ErrorCode::kUnknownTask, "no data attached for task '" + id + "'");
  return it->second;
}

}  // namespace

ExecutionReport execute(const ExperimentPlan& plan, const TaskCatalog& catalog, RunStore& store,
                        const RunOptions& options) {
  plan.validate();
  require(static_cast<bool>(options.backend), ErrorCode::kValidation, "no backend factory");

  TaskCatalog used;
  auto use = [&](const std::string& id) -> const TaskData& {
    const TaskData& data = catalog_task(catalog, id);
    used.emplace(id, data);
    return data;
  };
  std::vector<const TaskData*> tasks;
  if (plan.kind == PlanKind::kMatrix || plan.kind == PlanKind::kMtlAll) {
    for (const auto& id : plan.tasks) tasks.push_back(&use(id));
  } else {
    tasks = {&use(plan.target), &use(plan.support)};
  }
  record_task_sizes(store, used);

  Driver driver(plan, store, options);
  switch (plan.kind) {
    case PlanKind::kPair: {
      driver.mtl_pair(*tasks[0], *tasks[1]);
      auto [slot, resolve] = driver.stilts_support(*tasks[1]);
      driver.stilts_targets(slot, resolve, *tasks[0]);
      break;
    }
    case PlanKind::kMatrix: {
      for (const auto* target : tasks) {
        for (const auto* support : tasks) {
          if (target != support) driver.mtl_pair(*target, *support);
        }
      }
      for (const auto* support : tasks) {
        auto [slot, resolve] = driver.stilts_support(*support);
        for (const auto* target : tasks) {
          if (target != support) driver.stilts_targets(slot, resolve, *target);
        }
      }
      break;
    }
    case PlanKind::kMtlAll:
      driver.mtl_all(tasks);
      break;
    case PlanKind::kSizeSweep: {
      const SweepOptions& sweep = *plan.sweep;
      const TaskData* target = tasks[0];
      if (sweep.target_fraction != 1.0) {
        const SubsampleSpec spec{SubsampleMode::kFraction, sweep.target_fraction, sweep.data_seed};
        TaskData halved{target->spec, subsample(target->train, spec), target->dev, target->manifests};
        halved.manifests.push_back(make_manifest(target->train, spec, halved.train.size()));
        target = &driver.own(std::move(halved));
      }
      const TaskData& support = *tasks[1];
      const std::size_t effective = target->train.size();
      std::vector<SubsampleSpec> specs;
      for (double k : sweep.proportions) {
        SubsampleSpec spec{SubsampleMode::kProportionOfTarget, k, sweep.data_seed};
        try {
          requested_count(spec, support.train.size(), effective);
        } catch (const Error& e) {
          throw Error(e.code(), "K=" + reporting::format_fixed(k, 4) + ": " + e.what());
        }
        specs.push_back(spec);
      }
      for (const auto& spec : specs) {
        TaskData sub{support.spec, subsample(support.train, spec, effective), support.dev, support.manifests};
        sub.manifests.push_back(make_manifest(support.train, spec, sub.train.size()));
        const TaskData& owned = driver.own(std::move(sub));
        driver.mtl_pair(*target, owned);
        auto [slot, resolve] = driver.stilts_support(owned);
        driver.stilts_targets(slot, resolve, *target);
      }
      break;
    }
  }
  return driver.run();
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

namespace {

using SeedScores = std::map<std::uint64_t, double>;

std::vector<double> by_seed(const SeedScores& scores) {
  std::vector<double> out;
  for (const auto& [_, v] : scores) out.push_back(v);
  return out;
}

void add_sample(SeedScores& scores, const RunRecord& r) {
  auto [it, inserted] = scores.emplace(r.seed, r.final_score);
  require(inserted || it->second == r.final_score, ErrorCode::kIntegrity,
          "two different results for " + job_name(r));
}

}  // namespace

AnalysisResult analyze(const std::vector<RunRecord>& records, const TaskSizes& sizes,
                       const AnalysisOptions& options) {
  require(!records.empty(), ErrorCode::kValidation, "the run store is empty");

  std::map<stats::CellKey, SeedScores> mtl, stilts;
  std::map<PolicyKind, std::map<std::string, std::vector<double>>> mtl_all_runs;
  std::set<std::string> task_ids, configs;
  for (const auto& r : records) {
    if (r.experiment != options.experiment) continue;
    if (r.strategy == Strategy::kMtlAll) {
      for (const auto& [task, score] : r.task_scores) mtl_all_runs[r.sampling_policy][task].push_back(score);
      continue;
    }
    if (r.stage == Stage::kSupport) {
      task_ids.insert(r.target_task);
      continue;
    }
    require(r.support_tasks.size() == 1, ErrorCode::kIntegrity, "pairwise run " + r.run_id + " has no single support");
    const stats::CellKey key{r.target_task, r.support_tasks[0]};
    task_ids.insert(key.target);
    task_ids.insert(key.support);
    configs.insert(r.config);
    add_sample(r.strategy == Strategy::kMtlPair ? mtl[key] : stilts[key], r);
  }
  require(!task_ids.empty(), ErrorCode::kValidation,
          "no pairwise runs for experiment '" + options.experiment + "'");
  if (configs.size() > 1) {
    std::string list;
    for (const auto& c : configs) list += "\n  " + c;
    throw Error(ErrorCode::kValidation,
                "experiment '" + options.experiment + "' mixes run configurations:" + list);
  }

  std::vector<std::string> order(task_ids.begin(), task_ids.end());
  for (const auto& t : order) {
    require(sizes.count(t) > 0, ErrorCode::kValidation, "no training size recorded for task '" + t + "'");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) { return sizes.at(a) > sizes.at(b); });

  std::map<stats::CellKey, stats::CellSamples> samples;
  for (const auto& t : order) {
    for (const auto& s : order) {
      if (t == s) continue;
      const stats::CellKey key{t, s};
      stats::CellSamples cell;
      if (auto it = mtl.find(key); it != mtl.end()) cell.mtl = by_seed(it->second);
      if (auto it = stilts.find(key); it != stilts.end()) cell.stilts = by_seed(it->second);
      samples[key] = std::move(cell);
    }
  }

  AnalysisResult result;
  result.sizes = sizes;
  result.matrix = stats::build_significance_matrix(samples, order, options.alpha, options.test);

  reporting::MtlAllScores mtl_all;
  for (const auto& [policy, per_task] : mtl_all_runs) {
    std::map<std::string, double> means;
    for (const auto& t : order) {
      auto it = per_task.find(t);
      if (it == per_task.end()) break;
      means[t] = stats::aggregate(it->second).mean;
    }
    if (means.size() == order.size()) mtl_all[policy] = std::move(means);
  }

  result.difference = reporting::difference_matrix(result.matrix);
  result.predictions = prediction_grid(order, sizes);
  result.table = reporting::aggregate_table(result.matrix, mtl_all, sizes, options.tiebreak, true);
  result.heuristic = heuristic_accuracy(result.matrix, sizes, options.tiebreak);
  result.heatmap = reporting::render_heatmap(result.difference, result.matrix, result.predictions,
                                             options.tiebreak);

  std::ostringstream s;
  s << "experiment: " << options.experiment << '\n';
  s << "test: " << to_string(options.test) << ", alpha=" << options.alpha << '\n';
  s << "tasks by training size:";
  for (const auto& t : order) s << ' ' << t << '(' << sizes.at(t) << ')';
  s << '\n';
  s << "significant cells: " << result.matrix.significant_count() << " of " << result.matrix.cells.size()
    << '\n';
  s << "size heuristic (tie -> " << to_string(options.tiebreak) << "): ";
  if (result.heuristic.accuracy) {
    s << result.heuristic.correct << '/' << result.heuristic.total_significant << " = "
      << reporting::format_fixed(100.0 * *result.heuristic.accuracy) << "%\n";
  } else {
    s << "n/a (no significant cells)\n";
  }
  s << "misclassified cells:";
  if (result.heuristic.misses.empty()) s << " none";
  s << '\n';
  for (const auto& key : result.heuristic.misses) {
    const auto& cell = result.matrix.at(key.target, key.support);
    s << "  " << stats::to_string(key) << ' ' << to_string(cell.label) << " predicted "
      << to_string(resolve(select_strategy(sizes.at(key.target), sizes.at(key.support)), options.tiebreak))
      << " diff=" << reporting::format_fixed(cell.difference, 2) << '\n';
  }
  result.summary = s.str();
  return result;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed on " + path.string());
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

}  // namespace

void write_analysis(const AnalysisResult& r, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "matrix.csv", render([&](std::ostream& o) { reporting::write_grid_csv(o, r.difference); }));
  write_file(out_dir / "cells.jsonl", render([&](std::ostream& o) { reporting::write_cells_jsonl(o, r.matrix); }));
  write_file(out_dir / "predictions.csv",
             render([&](std::ostream& o) { write_prediction_grid(o, r.matrix.tasks, r.sizes); }));
  write_file(out_dir / "heatmap.svg", r.heatmap.svg);
  write_file(out_dir / "table.csv", render([&](std::ostream& o) { reporting::write_table_csv(o, r.table); }));
  write_file(out_dir / "table.txt", render([&](std::ostream& o) { reporting::write_table_text(o, r.table); }));
  write_file(out_dir / "summary.txt", r.summary);
}

std::vector<SweepResult> collect_sweeps(const std::vector<RunRecord>& records, const std::string& experiment) {
  struct Key {
    std::string target, support;
    double fraction;
    auto operator<=>(const Key&) const = default;
  };
  struct Acc {
    std::size_t effective = 0;
    std::map<double, std::pair<std::size_t, std::pair<SeedScores, SeedScores>>> by_k;
  };
  std::map<Key, Acc> acc;
  for (const auto& r : records) {
    if (r.experiment != experiment || r.stage == Stage::kSupport || r.strategy == Strategy::kMtlAll) continue;
    if (r.support_tasks.size() != 1) continue;
    const SubsampleManifest* k_manifest = nullptr;
    const SubsampleManifest* t_manifest = nullptr;
    for (const auto& m : r.provenance) {
      if (m.task_id == r.support_tasks[0] && m.mode == SubsampleMode::kProportionOfTarget) k_manifest = &m;
      if (m.task_id == r.target_task && m.mode == SubsampleMode::kFraction) t_manifest = &m;
    }
    if (!k_manifest) continue;
    Key key{r.target_task, r.support_tasks[0], t_manifest ? t_manifest->value : 1.0};
    auto& a = acc[key];
    const std::size_t effective =
        t_manifest ? t_manifest->result_count : floor_count(1.0 / k_manifest->value, k_manifest->result_count);
    if (t_manifest || a.effective == 0) a.effective = effective;
    auto& point = a.by_k[k_manifest->value];
    point.first = k_manifest->result_count;
    add_sample(r.strategy == Strategy::kMtlPair ? point.second.first : point.second.second, r);
  }
  std::vector<SweepResult> out;
  for (const auto& [key, a] : acc) {
    SweepResult s{key.target, key.support, key.fraction, a.effective, {}};
    for (const auto& [k, point] : a.by_k) {
      s.points.push_back({k, point.first, by_seed(point.second.first), by_seed(point.second.second)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::filesystem::path> write_sweep_reports(const std::vector<SweepResult>& sweeps,
                                                       const std::filesystem::path& out_dir) {
  require(!sweeps.empty(), ErrorCode::kValidation, "no size-sweep runs found");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& s : sweeps) {
    reporting::SweepSeries mtl, stilts;
    for (const auto& p : s.points) {
      if (!p.mtl.empty()) {
        mtl.proportions.push_back(p.proportion);
        mtl.samples.push_back(p.mtl);
      }
      if (!p.stilts.empty()) {
        stilts.proportions.push_back(p.proportion);
        stilts.samples.push_back(p.stilts);
      }
    }
    const std::string title = s.target + " target (" + reporting::format_fixed(100.0 * s.target_fraction, 0) +
                              "%, n=" + std::to_string(s.effective_target_size) + "), " + s.support +
                              " support: proportion K";
    const auto fig = reporting::render_size_sweep(mtl, stilts, title);
    const std::string stem = "sweep_" + s.target + "_" + s.support + "_f" +
                             reporting::format_fixed(s.target_fraction, 1);
    write_file(out_dir / (stem + ".svg"), fig.svg);
    write_file(out_dir / (stem + ".csv"), render([&](std::ostream& o) { reporting::write_sweep_csv(o, fig); }));
    written.push_back(out_dir / (stem + ".svg"));
    written.push_back(out_dir / (stem + ".csv"));
  }
  return written;
}

}  // namespace transel
