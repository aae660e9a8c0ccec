#include <benchmark/benchmark.h>

#include "stylelens/rules.hpp"
#include "stylelens/synth.hpp"

using namespace stylelens;

static void BM_MeasureAbstract(benchmark::State& state) {
  synth::StyleOptions o;
  o.words = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto text = synth::style_text(o, 0, 2, rng);
  const auto& lex = text::LexiconSet::builtin();
  for (auto _ : state) benchmark::DoNotOptimize(rules::measure(text, lex));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MeasureAbstract)->Arg(60)->Arg(200)->Arg(1000);

static void BM_MeasureCorpus(benchmark::State& state) {
  synth::StyleOptions o;
  o.docs_per_label = static_cast<std::size_t>(state.range(0));
  const auto arts = synth::style_corpus(o, {0, 1});
  const auto& lex = text::LexiconSet::builtin();
  for (auto _ : state) benchmark::DoNotOptimize(rules::measure_corpus(arts, lex));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(arts.size()));
}
BENCHMARK(BM_MeasureCorpus)->Arg(500)->Unit(benchmark::kMillisecond);
