// SPDX-License-Identifier: MIT
// Timings of the main kernels on the 4-corners skeletons and random measures.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "favard/direction_tree.hpp"
#include "favard/graph_extractor.hpp"
#include "favard/projection_engine.hpp"
#include "favard/set_models.hpp"
#include "tree_fixtures.hpp"

namespace {

using namespace favard;

void favard_length_cantor(benchmark::State& state) {
  const auto e = skeleton(four_corners(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(favard_length(e, 4096));
  state.counters["segments"] = static_cast<double>(e.segments.size());
}
BENCHMARK(favard_length_cantor)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void buffon_needles(benchmark::State& state) {
  const auto e = skeleton(four_corners(2));
  for (auto _ : state) benchmark::DoNotOptimize(favard_mc(e, static_cast<std::uint64_t>(state.range(0)), 7));
}
BENCHMARK(buffon_needles)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void maximal_function(benchmark::State& state) {
  const auto e = skeleton(four_corners(3));
  const auto nu = pushforward_density(e, 0.1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(maximal_value(nu, u(rng)));
  state.counters["breaks"] = static_cast<double>(nu.breaks.size());
}
BENCHMARK(maximal_function);

DiscreteMeasure strip_measure(int n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DiscreteMeasure mu;
  for (int i = 0; i < n; ++i) mu.push({u(rng), 0.3 * u(rng)}, 1.0 / n);
  return mu;
}

void bad_scale_counts(benchmark::State& state) {
  const auto mu = strip_measure(static_cast<int>(state.range(0)));
  const auto ids = testing::all_ids(mu.size());
  for (auto _ : state) benchmark::DoNotOptimize(bad_counts(mu, ids, {0.25, 1.0 / 64}));
}
BENCHMARK(bad_scale_counts)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void graph_extraction(benchmark::State& state) {
  const auto mu = strip_measure(static_cast<int>(state.range(0)));
  const auto ids = testing::all_ids(mu.size());
  const AngleInterval cone{0.25, 1.0 / 64};
  const auto counts = bad_counts(mu, ids, cone);
  const int m0 = *std::max_element(counts.begin(), counts.end());
  for (auto _ : state) benchmark::DoNotOptimize(extract_graph(mu, ids, cone, m0));
}
BENCHMARK(graph_extraction)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void direction_tree_line(benchmark::State& state) {
  const auto in = testing::uniform_input(testing::line(static_cast<int>(state.range(0))), testing::kVertical);
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(in));
}
BENCHMARK(direction_tree_line)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void direction_tree_four_corners(benchmark::State& state) {
  auto [mu, st] = testing::four_corners_stages();
  const auto in = tree_input(mu, st, 0.125, 5);
  for (auto _ : state) benchmark::DoNotOptimize(build_tree(in));
}
BENCHMARK(direction_tree_four_corners)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
