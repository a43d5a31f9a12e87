#include <benchmark/benchmark.h>

#include "sggmech/kernels.hpp"
#include "sggmech/rng.hpp"

using namespace sggmech;

namespace {

Matrix gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

template <auto Fn>
void bm_max_similarity(benchmark::State& state) {
  const auto rows = gaussian(static_cast<std::size_t>(state.range(0)), 256, 1);
  const auto keys = gaussian(150, 256, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(rows, keys));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void bm_step1(benchmark::State& state) {
  const auto visual = gaussian(static_cast<std::size_t>(state.range(0)), 256, 3);
  const auto objects = gaussian(150, 256, 4);
  const auto relations = gaussian(50, 256, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(visual, objects, relations, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void bm_cosine(benchmark::State& state) {
  const auto edges = gaussian(static_cast<std::size_t>(state.range(0)), 512, 6);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(edges));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(bm_max_similarity<kernels::serial::max_similarity>)->Name("max_similarity/serial")->Arg(1000)->Arg(5000);
BENCHMARK(bm_max_similarity<kernels::parallel::max_similarity>)->Name("max_similarity/parallel")->Arg(1000)->Arg(5000);
BENCHMARK(bm_step1<kernels::serial::step1_scores>)->Name("step1_scores/serial")->Arg(1000)->Arg(5000);
BENCHMARK(bm_step1<kernels::parallel::step1_scores>)->Name("step1_scores/parallel")->Arg(1000)->Arg(5000);
BENCHMARK(bm_cosine<kernels::serial::cosine_similarity>)->Name("cosine_similarity/serial")->Arg(128)->Arg(512);
BENCHMARK(bm_cosine<kernels::parallel::cosine_similarity>)->Name("cosine_similarity/parallel")->Arg(128)->Arg(512);

BENCHMARK_MAIN();
