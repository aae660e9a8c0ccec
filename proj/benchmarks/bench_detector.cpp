#include <benchmark/benchmark.h>

#include "stylelens/detector.hpp"
#include "stylelens/synth.hpp"

using namespace stylelens;

static void BM_ExtractFeatures(benchmark::State& state) {
  synth::StyleOptions o;
  std::mt19937_64 rng(1);
  const auto text = synth::style_text(o, 0, 2, rng);
  detector::FeatureExtractor fx(detector::FeatureConfig{}, text::LexiconSet::builtin());
  for (auto _ : state) benchmark::DoNotOptimize(fx.extract("x", text));
}
BENCHMARK(BM_ExtractFeatures);

static void BM_TrainTwoStyle(benchmark::State& state) {
  synth::StyleOptions o;
  o.docs_per_label = static_cast<std::size_t>(state.range(0));
  const auto arts = synth::style_corpus(o, {0, 1});
  detector::TrainOptions t;
  t.scope = detector::Scope{std::nullopt, 1};
  t.hash_dims = {1u << 16};
  t.l2_grid = {0.1};
  for (auto _ : state) benchmark::DoNotOptimize(detector::crossval_train(arts, t, text::LexiconSet::builtin()));
}
BENCHMARK(BM_TrainTwoStyle)->Arg(100)->Unit(benchmark::kMillisecond)->Iterations(2);
