// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fewl/similarity/index.hpp"
#include "fewl/theorylab/chain.hpp"
#include "fewl/util/rng.hpp"

namespace {

fewl::QuestionIndex random_index(std::size_t n, std::size_t dim) {
  fewl::util::SplitMix64 rng(99);
  std::vector<std::pair<std::string, fewl::EmbeddingVector>> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform() - 0.5;
    items.emplace_back("q" + std::to_string(i), fewl::EmbeddingVector(std::move(v)));
  }
  return fewl::build_index(std::move(items));
}

void BM_Similarities(benchmark::State& state, bool parallel) {
  const auto index = random_index(static_cast<std::size_t>(state.range(0)), 1536);
  for (auto _ : state) benchmark::DoNotOptimize(index.similarities_to(0, parallel));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Neighbors(benchmark::State& state, bool reference) {
  const auto index = random_index(static_cast<std::size_t>(state.range(0)), 1536);
  for (auto _ : state) {
    auto ns = reference ? fewl::neighbors_reference(index, "q0", 10, -0.2, 0.8)
                        : fewl::neighbors(index, "q0", 10, -0.2, 0.8);
    benchmark::DoNotOptimize(ns);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Theorem1(benchmark::State& state, bool serial) {
  const auto trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = serial ? fewl::theory::verify_theorem1_serial(trials, {4, 4, 4}, fewl::DivergenceKind::JS, 7)
                    : fewl::theory::verify_theorem1(trials, {4, 4, 4}, fewl::DivergenceKind::JS, 7);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Similarities, openmp, true)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Similarities, serial, false)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Neighbors, openmp, false)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Neighbors, reference, true)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Theorem1, openmp, false)->Arg(500)->Arg(5000);
BENCHMARK_CAPTURE(BM_Theorem1, serial, true)->Arg(500)->Arg(5000);

BENCHMARK_MAIN();
