#include <benchmark/benchmark.h>

#include <random>

#include "stylelens/econometrics.hpp"

using namespace stylelens;

namespace {

econ::DesignMatrix panel(int n, int k, int groups) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  econ::DesignMatrix d;
  d.x.resize(n, k);
  d.y.resize(n);
  for (int j = 0; j < k; ++j) d.columns.push_back("x" + std::to_string(j));
  std::vector<std::string> article, month;
  for (int i = 0; i < n; ++i) {
    article.push_back(std::to_string(i % groups));
    month.push_back(std::to_string(i % 24));
    for (int j = 0; j < k; ++j) d.x(i, j) = z(rng);
    d.y(i) = d.x.row(i).sum() + 0.01 * (i % groups) + z(rng);
  }
  d.fixed_effects.push_back(econ::FixedEffect::from_keys("article", article));
  d.fixed_effects.push_back(econ::FixedEffect::from_keys("month", month));
  return d;
}

}  // namespace

static void BM_OlsTwoWayFe(benchmark::State& state) {
  const auto d = panel(static_cast<int>(state.range(0)), 6, static_cast<int>(state.range(0)) / 7);
  econ::OlsOptions o;
  o.fixed_effects = {"article", "month"};
  for (auto _ : state) benchmark::DoNotOptimize(econ::fit_ols_fe(d, o));
}
BENCHMARK(BM_OlsTwoWayFe)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BM_MultinomialLogit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> label(0, 6);
  econ::DesignMatrix d;
  d.x.resize(n, 11);
  d.y.resize(n);
  for (int j = 0; j < 11; ++j) d.columns.push_back("r" + std::to_string(j));
  for (int i = 0; i < n; ++i) {
    d.y(i) = label(rng);
    for (int j = 0; j < 11; ++j) d.x(i, j) = z(rng) + 0.1 * d.y(i) * (j % 3);
  }
  for (auto _ : state) benchmark::DoNotOptimize(econ::fit_multinomial_logit(d));
}
BENCHMARK(BM_MultinomialLogit)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
