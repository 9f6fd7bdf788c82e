#include <benchmark/benchmark.h>

#include <random>

#include "regdec/applications.hpp"
#include "regdec/bounds.hpp"
#include "regdec/decompose.hpp"
#include "regdec/uniformity.hpp"

using namespace regdec;

namespace {

RandomVar random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n * n);
  for (auto& x : v) x = u(rng);
  return RandomVar(v);
}

Graphon random_graph(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) v[x * n + y] = v[y * n + x] = (rng() & 1U) ? 1.0 : 0.0;
  }
  return Graphon(GroundSpace::uniform(n), RandomVar(v));
}

}  // namespace

static void BM_CutNormExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto base = GroundSpace::uniform(n);
  const auto f = random_matrix(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(cut_norm_exact(f, base).value);
}
BENCHMARK(BM_CutNormExact)->DenseRange(6, 14, 4);

static void BM_SymmetricRectangleNorm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sr = make_symmetric_rectangles(GroundSpace::uniform(n));
  const auto f = random_matrix(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(uniformity_norm(f, *sr).value);
}
BENCHMARK(BM_SymmetricRectangleNorm)->DenseRange(4, 8, 2);

static void BM_HeuristicRectangleNorm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sr = make_rectangles(GroundSpace::uniform(n));
  const auto f = random_matrix(n, 3);
  SearchOptions heuristic;
  heuristic.mode = SearchMode::heuristic;
  for (auto _ : state) benchmark::DoNotOptimize(uniformity_norm(f, *sr, heuristic).value);
}
BENCHMARK(BM_HeuristicRectangleNorm)->Arg(8)->Arg(32);

static void BM_DecomposeRectangles(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sr = make_rectangles(GroundSpace::uniform(n));
  const auto f = random_matrix(n, 4);
  const auto growth = GrowthFunction::affine(8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f, *sr, 2.0, 0.25, growth).Q.size());
}
BENCHMARK(BM_DecomposeRectangles)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_WeakRegularity(benchmark::State& state) {
  const auto w = random_graph(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(graphon_weak_regularity(w, 2.0, 0.1).steps);
}
BENCHMARK(BM_WeakRegularity)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_RegularityBound(benchmark::State& state) {
  const auto growth = GrowthFunction::affine(2, 1);
  const auto ell = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(regularity_bound(1, ell, 1, 2, growth).overflowed);
}
BENCHMARK(BM_RegularityBound)->Arg(1)->Arg(2)->Arg(3);

static void BM_PartitionCountBound(benchmark::State& state) {
  const auto growth = GrowthFunction::successor();
  for (auto _ : state) benchmark::DoNotOptimize(partition_count_bound(2, BigRational(3, 4), 2, growth).overflowed);
}
BENCHMARK(BM_PartitionCountBound);
BENCHMARK_MAIN();
