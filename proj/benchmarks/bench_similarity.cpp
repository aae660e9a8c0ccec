#include <benchmark/benchmark.h>

#include <random>

#include "stylelens/similarity.hpp"

using namespace stylelens::similarity;

namespace {

TermVector random_vector(std::mt19937_64& rng, std::size_t terms, std::uint32_t vocab) {
  std::vector<TermVector::Entry> w;
  for (std::size_t i = 0; i < terms; ++i) w.emplace_back(static_cast<std::uint32_t>(rng() % vocab), 1.0 + rng() % 5);
  return TermVector::from_weights(std::move(w));
}

}  // namespace

static void BM_Cosine(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_vector(rng, static_cast<std::size_t>(state.range(0)), 50000);
  const auto b = random_vector(rng, static_cast<std::size_t>(state.range(0)), 50000);
  for (auto _ : state) benchmark::DoNotOptimize(cosine(a, b));
}
BENCHMARK(BM_Cosine)->Arg(100)->Arg(1000);

static void BM_Centroid(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<TermVector> vs;
  for (int i = 0; i < state.range(0); ++i) vs.push_back(random_vector(rng, 120, 20000));
  for (auto _ : state) benchmark::DoNotOptimize(group_centroid(vs));
}
BENCHMARK(BM_Centroid)->Arg(100)->Arg(2000)->Unit(benchmark::kMicrosecond);
