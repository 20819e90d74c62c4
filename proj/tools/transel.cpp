// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: run-pair, run-matrix, run-size-sweep, run-mtl-all,
// analyze and report.

#include <dlfcn.h>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "transel/error.hpp"
#include "transel/orchestrator.hpp"
#include "transel/task_registry.hpp"
#include "transel/tiny_backend.hpp"

namespace {

using namespace transel;

struct Options {
  std::vector<std::string> tasks;
  std::string target;
  std::string support;
  std::vector<std::uint64_t> seeds = default_seeds();
  std::string policy = "dynamic";
  double alpha = 0.1;
  std::string test = "welch";
  std::string tiebreak = "MTL_PAIR";
  std::size_t epochs = TrainConfig{}.epochs;
  std::size_t batch_size = TrainConfig{}.batch_size;
  double learning_rate = TrainConfig{}.learning_rate;
  double checkpoint_interval = TrainConfig{}.checkpoint_interval;
  std::string backend = "tiny";
  std::string out = "analysis";
  std::string store = "runs";
  std::size_t jobs = 1;
  std::string experiment;
  std::vector<std::string> synthetic;
  std::size_t features = 16;
  std::uint64_t data_seed = 0;
  std::string data_dir;
  std::string registry;
  double target_fraction = 1.0;
  std::vector<std::string> proportions;
  bool dry_run = false;
  bool quiet = false;
};

double parse_proportion(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return std::stod(text);
    return std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kValidation, "bad proportion '" + text + "'");
  }
}

BackendFactory make_backend(const std::string& name) {
  if (name == "tiny") return tiny_backend_factory();
  // Anything else is a shared library exporting
  //   extern "C" transel::Trainable* transel_make_backend();
  void* handle = dlopen(name.c_str(), RTLD_NOW | RTLD_LOCAL);
  require(handle != nullptr, ErrorCode::kValidation,
          "unknown backend '" + name + "' (not 'tiny' and not loadable: " + std::string(dlerror()) + ")");
  using Make = Trainable* (*)();
  auto make = reinterpret_cast<Make>(dlsym(handle, "transel_make_backend"));
  require(make != nullptr, ErrorCode::kValidation, "backend '" + name + "' has no transel_make_backend");
  return [make] { return std::unique_ptr<Trainable>(make()); };
}

TaskCatalog build_catalog(const Options& o, const std::vector<std::string>& needed) {
  std::map<std::string, SyntheticSpec> synthetic;
  for (const auto& text : o.synthetic) {
    auto spec = parse_synthetic_spec(text);
    spec.n_features = o.features;
    require(synthetic.emplace(spec.task_id, spec).second, ErrorCode::kDuplicateTask,
            "synthetic task '" + spec.task_id + "' given twice");
  }
  std::optional<Registry> registry;
  TaskCatalog catalog;
  for (const auto& id : needed) {
    if (catalog.count(id)) continue;
    if (auto it = synthetic.find(id); it != synthetic.end()) {
      catalog.emplace(id, synthetic_task_data(it->second, o.data_seed));
      continue;
    }
    require(!o.data_dir.empty(), ErrorCode::kUnknownTask,
            "task '" + id + "' is neither synthetic (--synthetic) nor loadable (no --data-dir)");
    if (!registry) registry = o.registry.empty() ? builtin_glue_registry() : Registry::load(o.registry);
    catalog.emplace(id, load_task_data(registry->get(id), o.data_dir));
  }
  return catalog;
}

ExperimentPlan make_plan(PlanKind kind, const Options& o) {
  ExperimentPlan plan;
  plan.kind = kind;
  plan.tasks = o.tasks;
  plan.target = o.target;
  plan.support = o.support;
  plan.seeds = o.seeds;
  plan.config.epochs = o.epochs;
  plan.config.batch_size = o.batch_size;
  plan.config.learning_rate = o.learning_rate;
  plan.config.checkpoint_interval = o.checkpoint_interval;
  plan.policy.kind = parse_policy_kind(o.policy);
  if (!o.experiment.empty()) {
    plan.experiment = o.experiment;
  } else if (kind == PlanKind::kSizeSweep) {
    plan.experiment = "size-sweep";
  }
  if (kind == PlanKind::kSizeSweep) {
    SweepOptions sweep;
    sweep.target_fraction = o.target_fraction;
    sweep.data_seed = o.data_seed;
    if (!o.proportions.empty()) {
      sweep.proportions.clear();
      for (const auto& p : o.proportions) sweep.proportions.push_back(parse_proportion(p));
    }
    plan.sweep = sweep;
  }
  if (kind == PlanKind::kMatrix || kind == PlanKind::kMtlAll) {
    require(o.target.empty() && o.support.empty(), ErrorCode::kValidation,
            "--target/--support do not apply here; use --tasks");
  } else {
    require(o.tasks.empty(), ErrorCode::kValidation, "--tasks does not apply here; use --target/--support");
  }
  plan.validate();
  return plan;
}

int run_plan(PlanKind kind, const Options& o) {
  const ExperimentPlan plan = make_plan(kind, o);
  const JobCounts counts = enumerate(plan);
  if (o.dry_run) {
    std::cout << "plan: " << to_string(plan.kind) << " experiment=" << plan.experiment << '\n'
              << "MTL_PAIR records: " << counts.mtl_pair << '\n'
              << "STILTS support records: " << counts.stilts_support << '\n'
              << "STILTS target records: " << counts.stilts_target << '\n'
              << "MTL_ALL records: " << counts.mtl_all << '\n'
              << "total records: " << counts.total() << '\n';
    return 0;
  }
  std::vector<std::string> needed = plan.tasks;
  if (needed.empty()) needed = {plan.target, plan.support};
  const TaskCatalog catalog = build_catalog(o, needed);
  RunStore store(o.store);
  if (store.dropped_partial_line() && !o.quiet) {
    std::cerr << "note: dropped an incomplete trailing record from " << store.runs_path() << '\n';
  }
  RunOptions run;
  run.backend = make_backend(o.backend);
  run.backend_name = o.backend;
  run.jobs = o.jobs;
  if (!o.quiet) run.log = [](const std::string& line) { std::cerr << line << '\n'; };
  const ExecutionReport report = execute(plan, catalog, store, run);
  std::cout << "appended " << report.appended << ", skipped " << report.skipped << " (expected "
            << counts.total() << " records)\n";
  return 0;
}

Prediction parse_tiebreak(const std::string& text) {
  if (text == "MTL_PAIR" || text == "mtl_pair" || text == "mtl") return Prediction::kMtlPair;
  if (text == "STILTS" || text == "stilts") return Prediction::kStilts;
  throw Error(ErrorCode::kValidation, "tiebreak must be MTL_PAIR or STILTS");
}

int run_analyze(const Options& o) {
  RunStore store(o.store);
  AnalysisOptions a;
  a.alpha = o.alpha;
  a.test = o.test == "student" ? stats::TTestKind::kStudent : stats::TTestKind::kWelch;
  require(o.test == "student" || o.test == "welch", ErrorCode::kValidation, "--test must be welch or student");
  a.tiebreak = parse_tiebreak(o.tiebreak);
  if (!o.experiment.empty()) a.experiment = o.experiment;
  const AnalysisResult result = analyze(store.records(), load_task_sizes(store), a);
  write_analysis(result, o.out);
  std::cout << result.summary;
  return 0;
}

int run_report(const Options& o) {
  RunStore store(o.store);
  const auto sweeps = collect_sweeps(store.records(), o.experiment.empty() ? "size-sweep" : o.experiment);
  for (const auto& path : write_sweep_reports(sweeps, o.out)) std::cout << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Compare sequential transfer (STILTs) with multi-task learning across task pairs"};
  app.set_config("--config", "", "TOML/INI file with any of the flags below; flags override it");
  app.require_subcommand(1);

  app.add_option("--tasks", o.tasks, "Task ids (matrix, MTL_ALL)")->delimiter(',');
  app.add_option("--target", o.target, "Target task (pair, size sweep)");
  app.add_option("--support", o.support, "Supporting task (pair, size sweep)");
  app.add_option("--seeds", o.seeds, "Random seeds")->delimiter(',')->capture_default_str();
  app.add_option("--policy", o.policy, "MTL sampling policy")
      ->check(CLI::IsMember({"uniform", "size", "dynamic"}))
      ->capture_default_str();
  app.add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
  app.add_option("--test", o.test, "t-test variant")->check(CLI::IsMember({"welch", "student"}))->capture_default_str();
  app.add_option("--tiebreak", o.tiebreak, "Method assumed for equal-size pairs")->capture_default_str();
  app.add_option("--epochs", o.epochs)->capture_default_str();
  app.add_option("--batch-size", o.batch_size)->capture_default_str();
  app.add_option("--lr", o.learning_rate, "Learning rate")->capture_default_str();
  app.add_option("--checkpoint-interval", o.checkpoint_interval, "Epochs between dev checkpoints")
      ->capture_default_str();
  app.add_option("--backend", o.backend, "'tiny' or a backend shared library")->capture_default_str();
  app.add_option("--out", o.out, "Output directory for analyze/report")->capture_default_str();
  app.add_option("--store", o.store, "Run store directory")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Concurrent training runs")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--experiment", o.experiment,
                 "Experiment name (default 'main', 'size-sweep' for sweeps)");
  app.add_option("--synthetic", o.synthetic, "Synthetic task name:n_train[:n_dev[:classes[:noise]]]");
  app.add_option("--features", o.features, "Feature count of synthetic tasks")->capture_default_str();
  app.add_option("--data-seed", o.data_seed, "Seed for synthetic data and subsampling")->capture_default_str();
  app.add_option("--data-dir", o.data_dir, "Directory with <task>/{train,dev}.{tsv,jsonl}");
  app.add_option("--registry", o.registry, "Task registry JSONL (default: built-in GLUE tasks)");
  app.add_option("--target-fraction", o.target_fraction, "Size sweep: 1.0 or 0.5")->capture_default_str();
  app.add_option("--proportions", o.proportions, "Size sweep K values, e.g. 1/3,1/2,1,2,3")->delimiter(',');
  app.add_flag("--dry-run", o.dry_run, "Count the records a run would produce and exit");
  app.add_flag("--quiet", o.quiet, "No progress output");

  int status = 0;
  auto sub = [&](const std::string& name, const std::string& help, std::function<int()> fn) {
    app.add_subcommand(name, help)->fallthrough()->callback([&status, fn] { status = fn(); });
  };
  sub("run-pair", "MTL_PAIR and STILTs for one (target, support) pair", [&] { return run_plan(PlanKind::kPair, o); });
  sub("run-matrix", "Both methods for every ordered task pair", [&] { return run_plan(PlanKind::kMatrix, o); });
  sub("run-size-sweep", "Both methods over support proportions K",
      [&] { return run_plan(PlanKind::kSizeSweep, o); });
  sub("run-mtl-all", "Joint training on all tasks", [&] { return run_plan(PlanKind::kMtlAll, o); });
  sub("analyze", "Significance matrix, heuristic accuracy, table and heatmap", [&] { return run_analyze(o); });
  sub("report", "Size-sweep plots and CSVs", [&] { return run_report(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kValidation ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
