#include <benchmark/benchmark.h>

#include "autometric/autometric.hpp"

using namespace autometric;

static void BM_InferRightWrong(benchmark::State& state) {
  auto sys = build_takeover_architecture().stages().front().system;
  sys.grid_points = static_cast<std::size_t>(state.range(0));
  const InferenceEngine engine(sys);
  const std::vector<double> in{5.5, 7.5, 60};
  for (auto _ : state) benchmark::DoNotOptimize(engine.infer(in));
}
BENCHMARK(BM_InferRightWrong)->Arg(101)->Arg(1001)->Arg(10001);

static void BM_EvaluateTakeover(benchmark::State& state) {
  const auto arch = build_takeover_architecture();
  const std::vector<double> in{7, 8, 65};
  for (auto _ : state) benchmark::DoNotOptimize(arch.evaluate(in));
}
BENCHMARK(BM_EvaluateTakeover);

static void BM_EvaluateDilemma(benchmark::State& state) {
  const auto arch = build_dilemma_architecture();
  const std::vector<double> in{10, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(arch.evaluate(in));
}
BENCHMARK(BM_EvaluateDilemma);

static void BM_SimulateTakeover(benchmark::State& state) {
  const auto arch = build_takeover_architecture();
  const auto sched = canonical_takeover_schedule(Waveform::triangle, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(arch, sched));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateTakeover)->Arg(308)->Arg(3080);

static void BM_NngeTrain(benchmark::State& state) {
  const auto ds = label_takeover(run_simulation(build_takeover_architecture(),
                                                canonical_takeover_schedule(Waveform::triangle, static_cast<std::size_t>(state.range(0)))));
  const auto features = ds.feature_names();
  const auto examples = examples_from(ds, features);
  for (auto _ : state) benchmark::DoNotOptimize(train(examples, features));
}
BENCHMARK(BM_NngeTrain)->Arg(308)->Arg(1000);

static void BM_KFold10(benchmark::State& state) {
  const auto ds = label_takeover(run_simulation(build_takeover_architecture(), canonical_takeover_schedule()));
  const auto features = ds.feature_names();
  const auto examples = examples_from(ds, features);
  for (auto _ : state) benchmark::DoNotOptimize(kfold_eval(examples, features, 10, 1));
}
BENCHMARK(BM_KFold10);
BENCHMARK_MAIN();
