#include <benchmark/benchmark.h>

#include <numeric>

#include "rost/eval.hpp"
#include "rost/pipeline.hpp"
#include "rost/sampler.hpp"
#include "rost/scheduler.hpp"
#include "rost/synth.hpp"

namespace {

rost::SyntheticStream make_stream(std::int64_t steps, std::size_t words) {
  rost::SeparableOptions opts;
  opts.steps = steps;
  opts.words_per_step = words;
  opts.seed = 1;
  return rost::generate(rost::make_separable(opts));
}

rost::Model loaded_model(const rost::Stream& stream, std::size_t topics, rost::Rng& rng) {
  rost::GibbsParams params;
  params.topics = topics;
  rost::Model model(params.model_config(100));
  for (const auto& obs : stream) {
    rost::init_labels(model, model.add_observation(obs.t, obs.words), rng);
  }
  return model;
}

// Word refinements per second for one batch sweep.
void BM_BatchSweep(benchmark::State& state) {
  const auto synth = make_stream(50, static_cast<std::size_t>(state.range(0)));
  rost::Rng rng(2);
  auto model = loaded_model(synth.stream, static_cast<std::size_t>(state.range(1)), rng);
  std::uint64_t words = 0;
  for (auto _ : state) words += rost::batch_gibbs(model, 1, rng);
  state.SetItemsProcessed(static_cast<std::int64_t>(words));
}
BENCHMARK(BM_BatchSweep)->Args({50, 8})->Args({50, 16})->Args({500, 16})->Args({2000, 16});

void BM_SchedulerSample(benchmark::State& state) {
  const auto variant = rost::kAllSchedulerVariants[static_cast<std::size_t>(state.range(0))];
  const rost::SchedulerKind kind{variant, 0.5, 0.5};
  rost::Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(rost::sample(kind, 3600, rng));
  state.SetLabel(std::string(rost::scheduler_name(variant)));
}
BENCHMARK(BM_SchedulerSample)->DenseRange(0, 7);

void BM_Perplexity(benchmark::State& state) {
  const auto synth = make_stream(100, 200);
  rost::Rng rng(4);
  auto model = loaded_model(synth.stream, 16, rng);
  std::vector<rost::TokenId> all(model.tokens().size());
  std::iota(all.begin(), all.end(), rost::TokenId{0});
  for (auto _ : state) benchmark::DoNotOptimize(rost::perplexity(model, all));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * all.size()));
}
BENCHMARK(BM_Perplexity);

// One full online run; R rounds per interval.
void BM_RunStream(benchmark::State& state) {
  const auto synth = make_stream(100, 50);
  rost::RunConfig cfg;
  cfg.params.topics = 8;
  cfg.scheduler = {rost::SchedulerVariant::UniformNow, 0.5, 0.5};
  cfg.budget = rost::Budget::rounds(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rost::run_stream(synth.stream, 100, cfg));
}
BENCHMARK(BM_RunStream)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
