// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <benchmark/benchmark.h>

#include "transel/data_pipeline.hpp"
#include "transel/rng.hpp"
#include "transel/scheduler.hpp"
#include "transel/stats.hpp"
#include "transel/tiny_backend.hpp"

namespace transel {
namespace {

void BM_BuildSchedule(benchmark::State& state) {
  const TaskSizes sizes = {{"A", 392702}, {"B", 2490}};
  SamplingPolicy policy;
  policy.kind = PolicyKind::kSize;
  const auto weights = initial_weights(policy, sizes);
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_schedule(weights, sizes, 32, steps, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildSchedule)->Arg(1000)->Arg(10000);

void BM_WelchTest(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> a(5), b(5);
  for (auto& x : a) x = 80 + rng.normal();
  for (auto& x : b) x = 81 + rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::t_test(a, b));
  }
}
BENCHMARK(BM_WelchTest);

void BM_TinyTrainStep(benchmark::State& state) {
  const auto task = make_synthetic_task("T", 512, 64, 16, 2, 0.1, 5);
  auto model = tiny_backend_factory()();
  model->init(0, 0.1);
  model->add_task(task.spec);
  std::vector<const Example*> batch;
  for (std::size_t i = 0; i < 32; ++i) batch.push_back(&task.train.examples[i]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->train_step("T", batch));
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TinyTrainStep);

void BM_Subsample(benchmark::State& state) {
  const auto task = make_synthetic_task("S", static_cast<std::size_t>(state.range(0)), 10, 4, 2, 0.0, 5);
  SubsampleSpec spec{SubsampleMode::kFraction, 0.5, 9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(subsample(task.train, spec));
  }
}
BENCHMARK(BM_Subsample)->Arg(10000)->Arg(100000);

}  // namespace
}  // namespace transel

BENCHMARK_MAIN();
